#include "nozzle/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "json.hpp"
#include "nozzle/io.hpp"

namespace nozzle {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    m = std::max(m, std::fabs(a[n] - b[n]));
  return m;
}

struct GradPhys {
  Field dr;          // d/dr, physical
  Field dphi_over_r; // (1/r) d/dphi, physical
};

GradPhys physical_grad(const Field& u, const ShockFront& front,
                       const MappedGrid& g, par::ExecMode mode) {
  GradPhys out;
  out.dr = d_drt(u, g, mode);
  out.dphi_over_r = d_dphi(u, g, mode);
  const int np = g.npn();
  par::parallel_for(
      g.n_nodes(),
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double rt = g.r_tilde(i), ph = g.phi(j);
        const double b = g.map_b(front, ph);
        const double c = g.map_c(front, rt, ph);
        const double r = g.physical_r(front, rt, ph);
        const double drt = out.dr[n];
        out.dr[n] = b * drt;
        out.dphi_over_r[n] = (out.dphi_over_r[n] + c * drt) / r;
      },
      mode);
  return out;
}

struct TFields {
  Field t_r, t_phi, t_theta;
};

TFields t_star_fields(const Field& psi, const Field& lambda,
                      const ShockFront& front, const MappedGrid& g,
                      par::ExecMode mode) {
  TFields t;
  t.t_r.assign(g.n_nodes(), 0.0);
  t.t_phi.assign(g.n_nodes(), 0.0);
  t.t_theta.assign(g.n_nodes(), 0.0);
  const GradPhys gp = physical_grad(psi, front, g, mode);
  const int np = g.npn();
  par::parallel_for(
      g.n_nodes(),
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double rt = g.r_tilde(i), ph = g.phi(j);
        const double r = g.physical_r(front, rt, ph);
        const double sp = std::sin(ph), cp = std::cos(ph);
        const double psi_dphi = gp.dphi_over_r[n] * r;  // d psi / d phi
        if (j == 0) {
          // Axis limits: psi and lambda vanish there.
          t.t_r[n] = 2.0 * psi_dphi / r;
          t.t_phi[n] = -gp.dr[n];  // -(psi/r + dpsi_dr) with psi = 0
          t.t_theta[n] = 0.0;
        } else {
          t.t_r[n] = (cp * psi[n] + sp * psi_dphi) / (r * sp);
          t.t_phi[n] = -psi[n] / r - gp.dr[n];
          t.t_theta[n] = lambda[n] / (r * sp);
        }
      },
      mode);
  return t;
}

struct FluxFields {
  Field m_r, m_phi;      // full flux A(grad phi, t)
  Field fstar_r, fstar_phi;
  Field a_coeff;         // scalar flux prefactor of the full state
  Field q_r, q_phi, q_theta;  // full velocity components
};

FluxFields flux_fields(const Field& chi, const TFields& t,
                       const ShockFront& front, const RadialProfile& profile,
                       const MappedGrid& g, par::ExecMode mode) {
  FluxFields out;
  const std::size_t nn = g.n_nodes();
  out.m_r.assign(nn, 0.0);
  out.m_phi.assign(nn, 0.0);
  out.fstar_r.assign(nn, 0.0);
  out.fstar_phi.assign(nn, 0.0);
  out.a_coeff.assign(nn, 0.0);
  out.q_r.assign(nn, 0.0);
  out.q_phi.assign(nn, 0.0);
  out.q_theta.assign(nn, 0.0);
  const GradPhys gp = physical_grad(chi, front, g, mode);
  const GasModel gas = profile.gas();
  const int np = g.npn();
  std::vector<std::string> failure(nn);
  par::parallel_for(
      nn,
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double rt = g.r_tilde(i), ph = g.phi(j);
        const double r = g.physical_r(front, rt, ph);
        const double u0 = profile.u_plus(r);
        const Vec3 q = {u0 + gp.dr[n] + t.t_r[n], gp.dphi_over_r[n] + t.t_phi[n],
                        t.t_theta[n]};
        const double q2 = norm2(q);
        if (q2 >= 2.0 * gas.b0 * (1.0 - 1e-10)) {
          failure[n] = "flux_fields: vacuum state at node";
          return;
        }
        const double a = std::pow(gas.b0 - 0.5 * q2, 1.0 / (gas.gamma - 1.0));
        const double a0 = std::pow(gas.b0 - 0.5 * u0 * u0, 1.0 / (gas.gamma - 1.0));
        const AijSample aij = aij_background(u0, gas);
        out.a_coeff[n] = a;
        out.q_r[n] = q[0];
        out.q_phi[n] = q[1];
        out.q_theta[n] = q[2];
        out.m_r[n] = a * q[0];
        out.m_phi[n] = a * q[1];
        out.fstar_r[n] = a0 * u0 - out.m_r[n] + aij.a_rr * gp.dr[n];
        out.fstar_phi[n] = -out.m_phi[n] + aij.a_pp * gp.dphi_over_r[n];
      },
      mode);
  for (const auto& msg : failure)
    if (!msg.empty()) throw VacuumError(msg);
  return out;
}

std::vector<double> grid_phi_nodes(const MappedGrid& g) {
  std::vector<double> ph(g.npn());
  for (int j = 0; j < g.npn(); ++j) ph[j] = g.phi(j);
  return ph;
}

std::vector<Vec3> face_vectors(const Field& a, const Field& b, const Field& c,
                               const MappedGrid& g, int i) {
  std::vector<Vec3> out(g.npn());
  for (int j = 0; j < g.npn(); ++j) {
    const std::size_t n = g.idx(i, j);
    out[j] = {a[n], b[n], c.empty() ? 0.0 : c[n]};
  }
  return out;
}

std::vector<double> face_values(const Field& a, const MappedGrid& g, int i) {
  std::vector<double> out(g.npn());
  for (int j = 0; j < g.npn(); ++j) out[j] = a[g.idx(i, j)];
  return out;
}

// Surface-measure mean of (phi^- - phi0^+) along the front (the anchor of
// the conormal solve).
double anchor_target(const ShockFront& front, const UpstreamField& up,
                     const RadialProfile& profile, const MappedGrid& g) {
  double num = 0.0, den = 0.0;
  const int np = g.npn();
  for (int j = 0; j < np; ++j) {
    const double ph = g.phi(j);
    const double f = front(ph);
    const double fp = front.slope(ph);
    const double meas = f * std::sqrt(f * f + fp * fp) * std::sin(ph);
    const double wq = (j == 0 || j == np - 1) ? 0.5 : 1.0;
    const double val = up.phi_pot(f, ph) - profile.phi_plus(f);
    num += wq * meas * val;
    den += wq * meas;
  }
  return num / den;
}

CubicSpline spline_over_phi(const std::vector<double>& phi,
                            const std::vector<double>& vals) {
  return CubicSpline(phi, vals, CubicSpline::End{true, 0.0},
                     CubicSpline::End{false, 0.0});
}

}  // namespace

double exit_pressure_profile(const RadialProfile& profile,
                             const PerturbationSpec& pert, double phi) {
  const double base = profile.p_plus(profile.geom().r_ex);
  const double phi0 = profile.geom().phi0;
  return base + pert.a_exit_uniform +
         pert.a_exit_cos * std::cos(pert.exit_k_mode * kPi * phi / phi0);
}

double exit_flux_baseline(const RadialProfile& profile) {
  const GasModel& gas = profile.gas();
  const double u = profile.u_plus(profile.geom().r_ex);
  return std::pow(gas.b0 - 0.5 * u * u, 1.0 / (gas.gamma - 1.0)) * u;
}

double pressure_map_coefficient(const RadialProfile& profile) {
  const GasModel& gas = profile.gas();
  const double g1 = gas.gamma - 1.0;
  const double u = profile.u_plus(profile.geom().r_ex);
  const double q = gas.b0 - 0.5 * u * u;
  const double k = aij_background(u, gas).a_rr;
  const double a1 = -gas.gamma * std::pow(q, 1.0 / g1) / g1 * u / k;
  const double p2 = std::pow(g1 / gas.gamma, gas.gamma / g1) *
                    std::pow(profile.s_plus(), -1.0 / g1);
  return p2 * a1;
}

Solution solve_fixed_exit_velocity(const RadialProfile& profile,
                                   const PerturbationSpec& pert,
                                   const std::vector<double>& v_ex,
                                   const SolverConfig& config) {
  const NozzleGeom& geom = profile.geom();
  const GasModel& gas = profile.gas();
  const double r_sh = profile.r_sh();
  MappedGrid grid{config.nr, config.nphi, r_sh, geom.r_ex, geom.phi0};
  if (v_ex.size() != std::size_t(grid.npn()))
    throw Error("solve_fixed_exit_velocity: v_ex needs one value per phi node");
  const UpstreamField up(profile, pert.upstream);
  const double v_c = exit_flux_baseline(profile);

  double sigma = up.is_background() ? 0.0 : up.sigma_estimate();
  double vdev = 0.0;
  for (double v : v_ex) vdev = std::max(vdev, std::fabs(v - v_c));
  sigma += vdev;
  if (sigma > config.sigma_admissible)
    throw Error("perturbation size " + std::to_string(sigma) +
                " exceeds the admissibility threshold " +
                std::to_string(config.sigma_admissible));

  const double box_lo =
      std::max(r_sh - 0.25, profile.r_plus_min() + 5e-3 * (geom.r_ex - geom.r_en));
  const double box_hi = std::min(r_sh + 0.25, geom.r_ex - 1e-3);
  up.validate_supersonic(std::max(geom.r_en, box_lo), std::min(box_hi + 0.05, geom.r_ex));

  Solution sol;
  sol.grid = grid;
  sol.front = ShockFront::constant(r_sh + config.front_init_offset, geom.phi0,
                                   grid.npn());
  const std::size_t nn = grid.n_nodes();
  sol.chi.assign(nn, 0.0);
  sol.psi.assign(nn, 0.0);
  sol.entropy.assign(nn, profile.s_plus());
  sol.lambda.assign(nn, 0.0);
  sol.v_ex = v_ex;
  SolveReport& rep = sol.report;
  rep.sigma = sigma;
  rep.vex_deviation = vdev;

  const AijField aij = assemble_aij(profile, sol.front, grid, config.mode);
  rep.min_ellipticity = aij.min_eigenvalue;

  const std::vector<double> phi_nodes = grid_phi_nodes(grid);
  double omega_f = config.omega_front;
  double omega_p = config.omega_psi;
  double prev_total = std::numeric_limits<double>::infinity();
  double dchi_last = 0.0, dfront_last = 0.0;
  EllipticOptions eopt;
  eopt.force_iterative = config.force_iterative;
  eopt.mode = config.mode;

  for (int outer = 0; outer < config.max_outer && !rep.converged; ++outer) {
    rep.outer_iters = outer + 1;
    // --- (chi, f) inner loop at frozen (psi, Lambda) ---
    bool inner_ok = false;
    for (int inner = 0; inner < config.max_inner; ++inner) {
      ++rep.inner_iters;
      const TFields t = t_star_fields(sol.psi, sol.lambda, sol.front, grid,
                                      config.mode);
      const FluxFields fx =
          flux_fields(sol.chi, t, sol.front, profile, grid, config.mode);
      const ShockData sd = shock_data(sol.front, up, phi_nodes, config.mode);
      const GradPhys gchi = physical_grad(sol.chi, sol.front, grid, config.mode);

      ConormalProblem pb;
      pb.profile = &profile;
      pb.front = &sol.front;
      pb.flux_r = fx.fstar_r;
      pb.flux_phi = fx.fstar_phi;
      const G1Data gd =
          g1_data(sd, sol.front, profile, up, face_values(sol.chi, grid, 0),
                  face_vectors(gchi.dr, gchi.dphi_over_r, Field{}, grid, 0),
                  face_vectors(t.t_r, t.t_phi, t.t_theta, grid, 0),
                  face_vectors(fx.fstar_r, fx.fstar_phi, Field{}, grid, 0));
      pb.g_shock = gd.g1;
      pb.g_exit.resize(grid.npn());
      for (int j = 0; j < grid.npn(); ++j) {
        const std::size_t n = grid.idx(grid.nr, j);
        pb.g_exit[j] = v_ex[j] - v_c - fx.a_coeff[n] * t.t_r[n];
      }
      pb.anchor_mean = anchor_target(sol.front, up, profile, grid);

      LinearSolveInfo info;
      Field chi_new = solve_conormal(pb, grid, &info, eopt);
      rep.anchor_defect = info.multiplier;

      const GradPhys gchin = physical_grad(chi_new, sol.front, grid, config.mode);
      const FrontUpdate fu = update_front(
          sol.front, up, profile, face_values(chi_new, grid, 0),
          face_vectors(gchin.dr, gchin.dphi_over_r, Field{}, grid, 0), omega_f,
          box_lo, box_hi);

      dchi_last = sup_diff(chi_new, sol.chi);
      dfront_last = fu.step_sup;
      rep.front_residual = fu.j_residual_sup;
      sol.chi = remap_between_fronts(chi_new, sol.front, fu.front, grid,
                                     config.mode);
      sol.psi = remap_between_fronts(sol.psi, sol.front, fu.front, grid,
                                     config.mode);
      sol.entropy = remap_between_fronts(sol.entropy, sol.front, fu.front, grid,
                                         config.mode);
      sol.lambda = remap_between_fronts(sol.lambda, sol.front, fu.front, grid,
                                        config.mode);
      sol.front = fu.front;
      if (fu.j_residual_sup < config.tol_front && dchi_last < config.tol_field) {
        inner_ok = true;
        break;
      }
    }
    sol.front_history.push_back(sol.front.values());

    // --- transport of S and Lambda along the updated flow ---
    const TFields t =
        t_star_fields(sol.psi, sol.lambda, sol.front, grid, config.mode);
    const FluxFields fx =
        flux_fields(sol.chi, t, sol.front, profile, grid, config.mode);
    const ShockData sd = shock_data(sol.front, up, phi_nodes, config.mode);
    const CubicSpline s_sh = spline_over_phi(phi_nodes, sd.s_sh);
    const CubicSpline lam_sh = spline_over_phi(phi_nodes, sd.lambda_sh);
    const StreamFunctionField sf =
        build_stream_function(fx.m_r, fx.m_phi, sol.front, grid, config.mode);
    rep.total_flux_dev = sf.total_flux_dev;
    const TransportSolution st = transport_scalar(s_sh, sf, config.mode);
    const TransportSolution lt = transport_scalar(lam_sh, sf, config.mode);
    const double ds = sup_diff(st.value, sol.entropy);
    const double dlam = sup_diff(lt.value, sol.lambda);
    sol.entropy = st.value;
    sol.lambda = lt.value;

    // --- stream component ---
    Field G(nn, 0.0);
    {
      const int np = grid.npn();
      std::vector<std::string> failure(nn);
      par::parallel_for(
          nn,
          [&](std::size_t n) {
            const int i = int(n) / np, j = int(n) % np;
            if (j == 0) return;  // axis limit of the source is zero
            const double rt = grid.r_tilde(i), ph = grid.phi(j);
            const double r = grid.physical_r(sol.front, rt, ph);
            const Vec3 q = {fx.q_r[n], fx.q_phi[n], fx.q_theta[n]};
            if (q[0] <= 0.0) {
              failure[n] = "stream source: q.e_r <= 0 at r = " + std::to_string(r);
              return;
            }
            try {
              G[n] = source_G(r, ph, sol.entropy[n], sol.lambda[n],
                              st.dvalue_dphi[n], lt.dvalue_dphi[n], q, gas);
            } catch (const Error& e) {
              failure[n] = e.what();
            }
          },
          config.mode);
      for (const auto& m : failure)
        if (!m.empty()) throw StagnationError(m);
    }
    StreamProblem sp;
    sp.front = &sol.front;
    sp.source = G;
    sp.mu = sd.mu;
    sp.robin_rhs = sd.robin_rhs;
    if (std::any_of(sd.mu.begin(), sd.mu.end(), [](double m) { return !(m < 0.0); }))
      omega_f *= 0.5;  // damp the front if coercivity is at risk
    LinearSolveInfo sinfo;
    Field psi_new = solve_stream(sp, grid, &sinfo, eopt);
    const double dpsi = sup_diff(psi_new, sol.psi);
    for (std::size_t n = 0; n < nn; ++n)
      sol.psi[n] += omega_p * (psi_new[n] - sol.psi[n]);

    const double total = dchi_last + dfront_last + ds + dlam + dpsi;
    sol.residual_history.push_back(total);
    rep.field_residual = std::max({ds, dlam, dpsi, dchi_last});
    if (inner_ok && ds < config.tol_field && dlam < config.tol_field &&
        dpsi < config.tol_field) {
      rep.converged = true;
      break;
    }
    if (outer >= 3 && total > prev_total) {
      omega_f *= 0.5;
      omega_p *= 0.5;
      ++rep.omega_halvings;
    }
    prev_total = total;
  }

  // Deviation norms in the shape of the stability estimate.
  {
    const int np = grid.npn();
    FieldNorms& d = rep.deviation;
    for (double fv : sol.front.values())
      d.front = std::max(d.front, std::fabs(fv - r_sh));
    for (std::size_t n = 0; n < nn; ++n) {
      d.entropy = std::max(d.entropy, std::fabs(sol.entropy[n] - profile.s_plus()));
      d.potential = std::max(d.potential, std::fabs(sol.chi[n]));
      d.stream = std::max(d.stream, std::fabs(sol.psi[n]));
      const int i = int(n) / np, j = int(n) % np;
      if (j > 0) {
        const double r = grid.physical_r(sol.front, grid.r_tilde(i), grid.phi(j));
        d.swirl = std::max(
            d.swirl, std::fabs(sol.lambda[n] / (r * std::sin(grid.phi(j)))));
      }
    }
    rep.swirl_over_sin_bound = d.swirl;
    rep.stability_ratio = sigma > 0.0 ? d.total() / sigma : 0.0;
    rep.holder_chi = weighted_norm(sol.chi, 1, -config.alpha_norm,
                                   config.alpha_norm, grid, NormEdge::Wall,
                                   config.mode);
    rep.holder_psi = weighted_norm(sol.psi, 1, -config.alpha_norm,
                                   config.alpha_norm, grid, NormEdge::Wall,
                                   config.mode);
    std::vector<double> fdev(sol.front.values());
    for (double& v : fdev) v -= r_sh;
    rep.holder_front = weighted_norm_1d(phi_nodes, fdev, 1,
                                        -1.0 - config.alpha_norm,
                                        config.alpha_norm);
  }
  recover_primitives(profile, pert, sol);
  return sol;
}

void recover_primitives(const RadialProfile& profile,
                        const PerturbationSpec& pert, Solution& sol) {
  const MappedGrid& grid = sol.grid;
  const GasModel& gas = profile.gas();
  const std::size_t nn = grid.n_nodes();
  const int np = grid.npn();
  const par::ExecMode mode = par::default_mode();
  const TFields t = t_star_fields(sol.psi, sol.lambda, sol.front, grid, mode);
  const GradPhys gchi = physical_grad(sol.chi, sol.front, grid, mode);
  sol.rho.assign(nn, 0.0);
  sol.p.assign(nn, 0.0);
  sol.u_r.assign(nn, 0.0);
  sol.u_phi.assign(nn, 0.0);
  sol.u_theta.assign(nn, 0.0);
  sol.machf.assign(nn, 0.0);
  SolveReport& rep = sol.report;
  double bdev = 0.0, mach_max = 0.0;
  for (std::size_t n = 0; n < nn; ++n) {
    const int i = int(n) / np, j = int(n) % np;
    const double r = grid.physical_r(sol.front, grid.r_tilde(i), grid.phi(j));
    const Vec3 u = {profile.u_plus(r) + gchi.dr[n] + t.t_r[n],
                    gchi.dphi_over_r[n] + t.t_phi[n], t.t_theta[n]};
    const double rho = density_closure(sol.entropy[n], u, gas);
    const double p = sol.entropy[n] * std::pow(rho, gas.gamma);
    const PrimState s{rho, u, p};
    sol.rho[n] = rho;
    sol.p[n] = p;
    sol.u_r[n] = u[0];
    sol.u_phi[n] = u[1];
    sol.u_theta[n] = u[2];
    sol.machf[n] = mach(s, gas);
    bdev = std::max(bdev, std::fabs(bernoulli(s, gas) - gas.b0));
    mach_max = std::max(mach_max, sol.machf[n]);
  }
  rep.bernoulli_dev = bdev;
  rep.mach_downstream_max = mach_max;

  // Upstream trace Mach along the front.
  const UpstreamField up(profile, pert.upstream);
  double mach_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < np; ++j) {
    const double ph = grid.phi(j);
    const PrimState s = up.state(sol.front(ph), ph);
    mach_min = std::min(mach_min, mach(s, gas));
  }
  rep.mach_upstream_min = mach_min;

  // Rankine-Hugoniot residuals at the front, scaled by background fluxes.
  const double rsh = profile.r_sh();
  const double mass_scale = profile.rho_minus(rsh) * profile.u_minus(rsh);
  const double mom_scale = mass_scale * profile.u_minus(rsh) + profile.p_minus(rsh);
  double rm = 0.0, rp = 0.0, re = 0.0, rt = 0.0;
  for (int j = 0; j < np; ++j) {
    const double ph = grid.phi(j);
    const auto nf3 = sol.front.normal(ph);
    const auto tf3 = sol.front.tangent(ph);
    const Vec3 nf = {nf3[0], nf3[1], nf3[2]};
    const Vec3 tf = {tf3[0], tf3[1], tf3[2]};
    const PrimState um = up.state(sol.front(ph), ph);
    const std::size_t n = grid.idx(0, j);
    const PrimState ud{sol.rho[n], {sol.u_r[n], sol.u_phi[n], sol.u_theta[n]},
                       sol.p[n]};
    const double unm = dot(um.vel, nf), und = dot(ud.vel, nf);
    rm = std::max(rm, std::fabs(um.rho * unm - ud.rho * und) / mass_scale);
    rp = std::max(rp, std::fabs(um.rho * unm * unm + um.p -
                                (ud.rho * und * und + ud.p)) /
                          mom_scale);
    re = std::max(re, std::fabs(um.rho * unm * bernoulli(um, gas) -
                                ud.rho * und * bernoulli(ud, gas)) /
                          (mass_scale * gas.b0));
    double tang = std::fabs(dot(um.vel, tf) - dot(ud.vel, tf));
    tang = std::max(tang, std::fabs(um.vel[2] - ud.vel[2]));
    rt = std::max(rt, tang / profile.u_minus(rsh));
  }
  rep.rh_mass = rm;
  rep.rh_momentum = rp;
  rep.rh_energy = re;
  rep.rh_tangential = rt;

  // Discrete continuity residual of the recovered mass flux.
  Field fr(nn), fp(nn);
  for (std::size_t n = 0; n < nn; ++n) {
    fr[n] = sol.rho[n] * sol.u_r[n];
    fp[n] = sol.rho[n] * sol.u_phi[n];
  }
  const GradPhys dfr = physical_grad(fr, sol.front, grid, mode);
  const GradPhys dfp = physical_grad(fp, sol.front, grid, mode);
  double divmax = 0.0;
  for (std::size_t n = 0; n < nn; ++n) {
    const int i = int(n) / np, j = int(n) % np;
    if (i == 0 || i == grid.nr || j == 0 || j == grid.nphi) continue;
    const double ph = grid.phi(j);
    const double r = grid.physical_r(sol.front, grid.r_tilde(i), ph);
    const double div = dfr.dr[n] + 2.0 * fr[n] / r + dfp.dphi_over_r[n] +
                       fp[n] * std::cos(ph) / (r * std::sin(ph));
    divmax = std::max(divmax, std::fabs(div) / (mass_scale / rsh));
  }
  rep.div_mass_flux = divmax;
}

Solution solve_for_exit_pressure(const RadialProfile& profile,
                                 const PerturbationSpec& pert,
                                 const SolverConfig& config) {
  MappedGrid grid{config.nr, config.nphi, profile.r_sh(),
                  profile.geom().r_ex, profile.geom().phi0};
  const int np = grid.npn();
  const double v_c = exit_flux_baseline(profile);
  const double b1 = pressure_map_coefficient(profile);
  std::vector<double> v_ex(np, v_c);
  std::vector<double> p_target(np);
  for (int j = 0; j < np; ++j)
    p_target[j] = exit_pressure_profile(profile, pert, grid.phi(j));

  Solution sol;
  double sigma_exit = 0.0;
  const double p_base = profile.p_plus(profile.geom().r_ex);
  for (double pt : p_target)
    sigma_exit = std::max(sigma_exit, std::fabs(pt - p_base));
  for (int it = 0; it < config.max_pressure_iters; ++it) {
    sol = solve_fixed_exit_velocity(profile, pert, v_ex, config);
    sol.report.pressure_iters = it + 1;
    double mismatch = 0.0;
    for (int j = 0; j < np; ++j) {
      const double pj = sol.p[grid.idx(grid.nr, j)];
      mismatch = std::max(mismatch, std::fabs(pj - p_target[j]));
      v_ex[j] -= (pj - p_target[j]) / b1;
    }
    sol.report.pressure_residual = mismatch;
    if (mismatch < config.tol_pressure) break;
    if (it + 1 == config.max_pressure_iters) sol.report.converged = false;
  }
  sol.report.sigma =
      (pert.upstream.zero() ? 0.0
                            : UpstreamField(profile, pert.upstream).sigma_estimate()) +
      sigma_exit;
  sol.report.stability_ratio = sol.report.sigma > 0.0
                                   ? sol.report.deviation.total() / sol.report.sigma
                                   : 0.0;
  return sol;
}

SweepResult stability_sweep(const RadialProfile& profile,
                            const PerturbationSpec& family,
                            const std::vector<double>& sigmas,
                            const SolverConfig& config, bool concurrent) {
  SweepResult res;
  res.rows.resize(sigmas.size());
  auto run = [&](std::size_t k) {
    SweepRow row;
    row.sigma_request = sigmas[k];
    try {
      const PerturbationSpec pert = family.scaled(sigmas[k]);
      const Solution sol = solve_for_exit_pressure(profile, pert, config);
      row.sigma_measured = sol.report.sigma;
      row.deviation = sol.report.deviation.total();
      row.ratio = row.sigma_measured > 0.0 ? row.deviation / row.sigma_measured
                                           : 0.0;
      row.converged = sol.report.converged;
    } catch (const Error&) {
      row.converged = false;
    }
    res.rows[k] = row;
  };
  if (concurrent && sigmas.size() > 1) {
    std::vector<std::thread> pool;
    pool.reserve(sigmas.size());
    for (std::size_t k = 0; k < sigmas.size(); ++k)
      pool.emplace_back(run, k);
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t k = 0; k < sigmas.size(); ++k) run(k);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool any = false;
  for (const auto& row : res.rows) {
    if (!row.converged || row.sigma_request == 0.0) continue;
    any = true;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  if (any) {
    res.ratio_spread = (hi - lo) / (0.5 * (hi + lo));
    res.linear_regime = res.ratio_spread < 0.15;
  }
  return res;
}

std::string SolveReport::to_json() const {
  nlohmann::ordered_json j;
  j["converged"] = converged;
  j["iterations"] = {{"outer", outer_iters},
                     {"inner", inner_iters},
                     {"pressure", pressure_iters},
                     {"omega_halvings", omega_halvings}};
  j["sigma"] = sigma;
  j["deviation"] = {{"front", deviation.front},
                    {"entropy", deviation.entropy},
                    {"swirl", deviation.swirl},
                    {"potential", deviation.potential},
                    {"stream", deviation.stream},
                    {"total", deviation.total()}};
  j["stability_ratio"] = stability_ratio;
  j["residuals"] = {{"front", front_residual},
                    {"field", field_residual},
                    {"pressure", pressure_residual},
                    {"anchor_defect", anchor_defect}};
  j["holder_diagnostics"] = {{"front", holder_front},
                             {"potential", holder_chi},
                             {"stream", holder_psi}};
  j["rankine_hugoniot"] = {{"mass", rh_mass},
                           {"momentum", rh_momentum},
                           {"energy", rh_energy},
                           {"tangential", rh_tangential}};
  j["consistency"] = {{"bernoulli_dev", bernoulli_dev},
                      {"div_mass_flux", div_mass_flux},
                      {"total_flux_dev", total_flux_dev},
                      {"min_ellipticity", min_ellipticity}};
  j["mach"] = {{"upstream_min", mach_upstream_min},
               {"downstream_max", mach_downstream_max}};
  j["swirl_over_sin_bound"] = swirl_over_sin_bound;
  j["vex_deviation"] = vex_deviation;
  return j.dump(2) + "\n";
}

void write_solution_csv(const std::string& path, const Solution& sol) {
  const MappedGrid& g = sol.grid;
  std::string body =
      "r_tilde,phi,r,chi,psi,S,Lambda,rho,u_r,u_phi,u_theta,p,mach\n";
  for (int i = 0; i <= g.nr; ++i)
    for (int j = 0; j <= g.nphi; ++j) {
      const std::size_t n = g.idx(i, j);
      const double rt = g.r_tilde(i), ph = g.phi(j);
      body += format_csv_row({rt, ph, g.physical_r(sol.front, rt, ph),
                              sol.chi[n], sol.psi[n], sol.entropy[n],
                              sol.lambda[n], sol.rho[n], sol.u_r[n],
                              sol.u_phi[n], sol.u_theta[n], sol.p[n],
                              sol.machf[n]});
    }
  write_file_atomic(path, body);
}

void write_front_history_csv(const std::string& path,
                             const std::vector<std::vector<double>>& history,
                             const std::vector<double>& phi_nodes) {
  std::string body = "iter,phi,f\n";
  for (std::size_t it = 0; it < history.size(); ++it)
    for (std::size_t j = 0; j < phi_nodes.size(); ++j)
      body += std::to_string(it) + "," + format_double(phi_nodes[j]) + "," +
              format_double(history[it][j]) + "\n";
  write_file_atomic(path, body);
}

void write_residual_csv(const std::string& path,
                        const std::vector<double>& residuals) {
  std::string body = "iter,residual\n";
  for (std::size_t it = 0; it < residuals.size(); ++it)
    body += std::to_string(it) + "," + format_double(residuals[it]) + "\n";
  write_file_atomic(path, body);
}

void write_gnuplot_script(const std::string& path, const std::string& field_csv,
                          const std::string& front_csv,
                          const std::string& residual_csv) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 900,700\n";
  s += "set key autotitle columnhead\n";
  s += "set output 'front.png'\n";
  s += "set xlabel 'phi'; set ylabel 'f(phi)'\n";
  s += "plot '" + front_csv + "' using 1:2 with lines title 'front'\n";
  s += "set output 'mach.png'\n";
  s += "set xlabel 'r'; set ylabel 'phi'\n";
  s += "set view map\n";
  s += "splot '" + field_csv + "' using 3:2:13 with points pt 5 ps 0.6 palette title 'Mach'\n";
  s += "set output 'residuals.png'\n";
  s += "set logscale y\n";
  s += "set xlabel 'outer iteration'; set ylabel 'residual'\n";
  s += "plot '" + residual_csv + "' using 1:2 with linespoints title 'update size'\n";
  write_file_atomic(path, s);
}

}  // namespace nozzle
