#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nozzle/background.hpp"
#include "nozzle/geometry.hpp"

namespace nozzle {

// Background coefficient matrix of the linearized potential operator. In
// spherical components it is diagonal: a_rr carries the streamwise 1 - M^2
// reduction, a_pp the isotropic part.
struct AijSample {
  double a_rr;
  double a_pp;
};

// a_ij at background speed u0 (with the global Bernoulli constant):
//   a_pp = (B0 - u0^2/2)^{1/(gamma-1)}
//   a_rr = a_pp - u0^2 (B0 - u0^2/2)^{(2-gamma)/(gamma-1)} / (gamma-1).
AijSample aij_background(double u0, const GasModel& gas);

struct AijField {
  Field a_rr;
  Field a_pp;
  double min_eigenvalue;
};

// Nodal coefficients on the mapped rectangle (physical radius under the
// front map). Throws EllipticityLost if any nodal matrix has an eigenvalue
// <= 0, i.e. the background is not subsonic on the covered band.
AijField assemble_aij(const RadialProfile& profile, const ShockFront& front,
                      const MappedGrid& grid,
                      par::ExecMode mode = par::default_mode());

struct EllipticOptions {
  bool force_iterative = false;       // exercise the CG path on small grids
  std::size_t direct_limit = 1000000; // unknowns above this use CG
  double cg_rtol = 1e-13;
  int cg_max_iter = 20000;
  std::string dump_matrix_path;       // Matrix Market dump when nonempty
  par::ExecMode mode = par::default_mode();
};

struct LinearSolveInfo {
  double residual = 0.0;        // ||Ax - b||_inf / max(1, ||b||_inf)
  double multiplier = 0.0;      // compatibility defect of the anchored solve
  int iterations = 0;           // CG iterations (0 in the direct path)
  bool used_iterative = false;
};

// Linear conormal problem for the potential correction chi on the mapped
// rectangle: div(a(0) grad chi - F) = Q with prescribed outward conormal
// flux (a grad chi - F).n on shock / wall / exit, the axis a symmetry line.
// Pure flux data leaves chi defined up to a constant; the solve is anchored
// by fixing the surface mean of chi on the shock to anchor_mean.
struct ConormalProblem {
  const RadialProfile* profile = nullptr;
  const ShockFront* front = nullptr;
  Field flux_r;                  // physical spherical components at nodes
  Field flux_phi;                // (empty means zero)
  Field source;                  // scalar volume source Q (empty means zero)
  std::vector<double> g_shock;   // outward flux datum, one per phi node
  std::vector<double> g_wall;    // one per r node (empty means zero)
  std::vector<double> g_exit;    // one per phi node (empty means zero)
  double anchor_mean = 0.0;
};

Field solve_conormal(const ConormalProblem& pb, const MappedGrid& grid,
                     LinearSolveInfo* info = nullptr,
                     const EllipticOptions& opt = {});

// Scalar stream problem -(Lap - 1/(r^2 sin^2 phi)) psi = G with Robin data
// -grad(psi).n_f + mu psi = A on the shock and psi = 0 on axis, wall, exit.
struct StreamProblem {
  const ShockFront* front = nullptr;
  Field source;                  // G at nodes
  std::vector<double> mu;        // Robin coefficient per shock phi node, < 0
  std::vector<double> robin_rhs; // A(f, f') per shock phi node
};

Field solve_stream(const StreamProblem& pb, const MappedGrid& grid,
                   LinearSolveInfo* info = nullptr,
                   const EllipticOptions& opt = {});

// Total discrete flux functional of the last assembled conormal system
// (sum of all interior equations); zero to solver tolerance by the
// divergence theorem on the scheme.
double conormal_flux_balance(const ConormalProblem& pb, const MappedGrid& grid,
                             const Field& chi,
                             const EllipticOptions& opt = {});

}  // namespace nozzle
