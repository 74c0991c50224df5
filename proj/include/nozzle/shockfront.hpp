#pragma once

#include <vector>

#include "nozzle/background.hpp"
#include "nozzle/geometry.hpp"
#include "nozzle/upstream.hpp"

namespace nozzle {

// All per-node jump data on the shock surface r = f(phi).
struct ShockData {
  std::vector<double> phi;        // node angles
  std::vector<Vec3> n_f;          // unit normal, pointing downstream
  std::vector<Vec3> tau_f;        // unit tangent in the (r, phi) plane
  std::vector<PrimState> up;      // upstream traces at (f(phi), phi)
  std::vector<double> un_minus;   // u^- . n_f
  std::vector<double> k_s;        // K_s(f')
  std::vector<double> s_sh;       // S_sh(f'), downstream entropy datum
  std::vector<double> q_n;        // downstream normal speed K_s/(u^- . n_f)
  std::vector<double> rho_down;   // implied downstream density at the front
  std::vector<double> lambda_sh;  // Lambda^- trace
  std::vector<double> mu;         // Robin coefficient of the psi condition
  std::vector<double> robin_rhs;  // A(f, f') from the upstream psi
};

// Evaluates the Rankine-Hugoniot shock data at the given phi nodes.
// Throws NotSupersonicError / AdmissibilityError when a node fails
// u^-.n_f > c^- normal-supersonic admissibility.
ShockData shock_data(const ShockFront& front, const UpstreamField& upstream,
                     const std::vector<double>& phi_nodes,
                     par::ExecMode mode = par::default_mode());

// Shock-condition drift coefficient mu_f: the ratio of line averages of
// d/dr (K0/u0^- - u0^+) and (u0^- - u0^+) between r_sh and f(phi).
double mu_f_coefficient(const RadialProfile& profile, double f_value);

struct G1Data {
  std::vector<double> g1;          // outward conormal flux datum on the shock
  std::vector<double> mu_f;        // drift coefficient per node
  std::vector<double> j_residual;  // Dirichlet defect (phi^- - phi0^+ - chi)
};

// Neumann datum of the linearized potential problem on the shock. chi,
// grad_chi (physical spherical components), t_star and the deviation flux
// F_star are the current-iterate traces at the shock nodes.
G1Data g1_data(const ShockData& sd, const ShockFront& front,
               const RadialProfile& profile, const UpstreamField& upstream,
               const std::vector<double>& chi_trace,
               const std::vector<Vec3>& grad_chi_trace,
               const std::vector<Vec3>& t_star_trace,
               const std::vector<Vec3>& f_star_trace);

struct FrontUpdate {
  ShockFront front;
  double j_residual_sup = 0.0;  // sup |phi^- - phi0^+ - chi| before the step
  double step_sup = 0.0;        // sup |f_new - f|
  int clipped = 0;              // nodes projected back into the box
};

// Damped Newton step of the free-boundary relation (phi^- - phi)(f, .) = 0.
// chi_trace / dchi_dr_trace are the current potential correction and its
// radial derivative at the shock nodes. Throws FrontOutOfRangeError when
// more than 10% of the nodes hit the admissible box.
FrontUpdate update_front(const ShockFront& front, const UpstreamField& upstream,
                         const RadialProfile& profile,
                         const std::vector<double>& chi_trace,
                         const std::vector<Vec3>& grad_chi_trace,
                         double omega, double box_lo, double box_hi);

}  // namespace nozzle
