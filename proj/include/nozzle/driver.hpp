#pragma once

#include <string>
#include <vector>

#include "nozzle/background.hpp"
#include "nozzle/elliptic.hpp"
#include "nozzle/geometry.hpp"
#include "nozzle/shockfront.hpp"
#include "nozzle/transport.hpp"
#include "nozzle/upstream.hpp"

namespace nozzle {

// Perturbation family: upstream modes plus an exit-pressure profile
// p_ex(phi) = p0+(r_ex) + uniform + cos-mode. scaled(s) scales every
// amplitude; the angular shapes are fixed.
struct PerturbationSpec {
  UpstreamModes upstream;
  double a_exit_cos = 0.0;
  double a_exit_uniform = 0.0;
  int exit_k_mode = 1;

  bool zero() const {
    return upstream.zero() && a_exit_cos == 0.0 && a_exit_uniform == 0.0;
  }
  PerturbationSpec scaled(double s) const {
    return {upstream.scaled(s), a_exit_cos * s, a_exit_uniform * s, exit_k_mode};
  }
};

double exit_pressure_profile(const RadialProfile& profile,
                             const PerturbationSpec& pert, double phi);

struct SolverConfig {
  int nr = 64;    // radial cells (nodes = nr + 1)
  int nphi = 32;  // angular cells
  int max_outer = 40;
  int max_inner = 15;
  int max_pressure_iters = 40;
  double tol_front = 1e-9;
  double tol_field = 1e-9;
  double tol_pressure = 1e-8;
  double omega_front = 0.7;
  double omega_psi = 1.0;
  double sigma_admissible = 5e-2;
  double alpha_norm = 0.6;
  bool force_iterative = false;
  double front_init_offset = 0.0;  // initial front = r_sh + offset
  par::ExecMode mode = par::default_mode();
};

struct FieldNorms {
  double front = 0.0;      // sup |f - r_sh|
  double entropy = 0.0;    // sup |S - S0+|
  double swirl = 0.0;      // sup |Lambda/(r sin phi)|
  double potential = 0.0;  // sup |chi|
  double stream = 0.0;     // sup |psi|
  double total() const {
    return front + entropy + swirl + potential + stream;
  }
};

struct SolveReport {
  bool converged = false;
  int outer_iters = 0;
  int inner_iters = 0;
  int pressure_iters = 0;
  int omega_halvings = 0;
  double sigma = 0.0;
  FieldNorms deviation;
  double holder_front = 0.0;  // weighted diagnostic estimators
  double holder_chi = 0.0;
  double holder_psi = 0.0;
  double front_residual = 0.0;
  double field_residual = 0.0;
  double pressure_residual = 0.0;
  double anchor_defect = 0.0;
  double min_ellipticity = 0.0;
  double rh_mass = 0.0;
  double rh_momentum = 0.0;
  double rh_energy = 0.0;
  double rh_tangential = 0.0;
  double bernoulli_dev = 0.0;
  double div_mass_flux = 0.0;
  double mach_upstream_min = 0.0;
  double mach_downstream_max = 0.0;
  double swirl_over_sin_bound = 0.0;
  double total_flux_dev = 0.0;
  double vex_deviation = 0.0;  // sup |v_ex - v_c|
  double stability_ratio = 0.0;

  std::string to_json() const;
};

// Full downstream solution on the mapped rectangle.
struct Solution {
  MappedGrid grid;
  ShockFront front;
  Field chi;     // potential correction
  Field psi;     // stream component
  Field entropy; // transported S
  Field lambda;  // transported angular momentum density
  std::vector<double> v_ex;  // exit flux datum per phi node
  // recovered primitives
  Field rho, p, u_r, u_phi, u_theta, machf;
  // iteration traces for plots and diagnostics
  std::vector<std::vector<double>> front_history;
  std::vector<double> residual_history;
  SolveReport report;
};

// Free-boundary solve at a prescribed exit normal mass flux v_ex (one value
// per exit phi node). Picard sweep psi -> (Lambda -> (chi, f) -> S) -> psi
// with damped Newton front updates. Throws on inadmissible inputs; a
// non-converged iteration returns converged = false with the best iterate.
Solution solve_fixed_exit_velocity(const RadialProfile& profile,
                                   const PerturbationSpec& pert,
                                   const std::vector<double>& v_ex,
                                   const SolverConfig& config);

// Outer Newton loop on v_ex matching the exit pressure profile, using the
// scalar leading coefficient of the pressure-to-velocity derivative.
Solution solve_for_exit_pressure(const RadialProfile& profile,
                                 const PerturbationSpec& pert,
                                 const SolverConfig& config);

// Fills the primitive fields (rho, u, p, Mach) of a solution and the
// consistency entries of its report (RH residuals, Bernoulli deviation,
// discrete continuity residual, Mach extrema).
void recover_primitives(const RadialProfile& profile,
                        const PerturbationSpec& pert, Solution& sol);

// The baseline exit flux value v_c of the background.
double exit_flux_baseline(const RadialProfile& profile);

// Scalar leading coefficient b1 = P2(background) * a1 of the exit map
// derivative; strictly negative.
double pressure_map_coefficient(const RadialProfile& profile);

struct SweepRow {
  double sigma_request = 0.0;   // family scale factor
  double sigma_measured = 0.0;  // discrete sigma of the scaled data
  double deviation = 0.0;       // total deviation norm
  double ratio = 0.0;           // deviation / sigma_measured
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double ratio_spread = 0.0;  // (max-min)/mid ratio over converged rows
  bool linear_regime = false; // spread < 15%
};

SweepResult stability_sweep(const RadialProfile& profile,
                            const PerturbationSpec& family,
                            const std::vector<double>& sigmas,
                            const SolverConfig& config,
                            bool concurrent = true);

// Field CSV (columns r_tilde, phi, r, chi, psi, S, Lambda, rho, u_r, u_phi,
// u_theta, p, mach) and a gnuplot script for the standard plots.
void write_solution_csv(const std::string& path, const Solution& sol);
void write_residual_csv(const std::string& path,
                        const std::vector<double>& residuals);
void write_gnuplot_script(const std::string& path, const std::string& field_csv,
                          const std::string& front_csv,
                          const std::string& residual_csv);
void write_front_history_csv(const std::string& path,
                             const std::vector<std::vector<double>>& history,
                             const std::vector<double>& phi_nodes);

}  // namespace nozzle
