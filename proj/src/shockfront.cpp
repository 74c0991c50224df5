#include "nozzle/shockfront.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nozzle/elliptic.hpp"

namespace nozzle {

ShockData shock_data(const ShockFront& front, const UpstreamField& upstream,
                     const std::vector<double>& phi_nodes, par::ExecMode mode) {
  const GasModel& gas = upstream.gas();
  const std::size_t n = phi_nodes.size();
  ShockData sd;
  sd.phi = phi_nodes;
  sd.n_f.resize(n);
  sd.tau_f.resize(n);
  sd.up.resize(n);
  sd.un_minus.resize(n);
  sd.k_s.resize(n);
  sd.s_sh.resize(n);
  sd.q_n.resize(n);
  sd.rho_down.resize(n);
  sd.lambda_sh.resize(n);
  sd.mu.resize(n);
  sd.robin_rhs.resize(n);
  std::vector<std::string> failure(n);

  par::parallel_for(
      n,
      [&](std::size_t j) {
        const double ph = phi_nodes[j];
        const double f = front(ph);
        const double fp = front.slope(ph);
        const auto nf = front.normal(ph);
        const auto tf = front.tangent(ph);
        sd.n_f[j] = {nf[0], nf[1], nf[2]};
        sd.tau_f[j] = {tf[0], tf[1], tf[2]};
        PrimState s;
        try {
          s = upstream.state(f, ph);
        } catch (const Error& e) {
          failure[j] = e.what();
          return;
        }
        sd.up[j] = s;
        const double un = dot(s.vel, sd.n_f[j]);
        sd.un_minus[j] = un;
        if (!(un > 0.0)) {
          failure[j] = "shock_data: u^-.n_f <= 0 at phi = " + std::to_string(ph);
          return;
        }
        const double c2 = gas.gamma * s.p / s.rho;
        if (!(un * un > c2)) {
          failure[j] = "shock_data: normal Mach <= 1 at phi = " +
                       std::to_string(ph) + " (inadmissible shock)";
          return;
        }
        const double ks = 2.0 * (gas.gamma - 1.0) / (gas.gamma + 1.0) *
                          (0.5 * un * un + c2 / (gas.gamma - 1.0));
        sd.k_s[j] = ks;
        const double rho_dn = s.rho * un * un / ks;
        if (!(rho_dn > 0.0)) {
          failure[j] = "shock_data: nonpositive downstream density";
          return;
        }
        sd.rho_down[j] = rho_dn;
        sd.q_n[j] = ks / un;
        sd.s_sh[j] = (s.rho * un * un + s.p - s.rho * ks) *
                     std::pow(rho_dn, -gas.gamma);
        sd.lambda_sh[j] = upstream.lambda(f, ph);
        // Robin coefficient of the psi condition, with the axis limit
        // f''(0)/f - 1/f^2 where f'(0) = 0.
        const double sp = std::sin(ph);
        if (sp < 1e-12) {
          sd.mu[j] = front.curvature(ph) / f - 1.0 / (f * f);
        } else {
          sd.mu[j] = fp * std::cos(ph) / (f * sp) - 1.0 / (f * f);
        }
        // A(f, f') from the upstream stream function.
        const double norm = std::sqrt(fp * fp + 1.0 / (f * f));
        const double curl_r_term = upstream.curl_r(f, ph);  // (1/(r sin)) d_phi(sin psi)
        const double psi_m = upstream.psi(f, ph);
        const double dpsi_dr = upstream.dpsi_dr(f, ph);
        sd.robin_rhs[j] =
            (fp * curl_r_term - (psi_m + f * dpsi_dr) / (f * f)) / norm;
      },
      mode);
  for (const auto& msg : failure) {
    if (msg.empty()) continue;
    if (msg.find("supersonic") != std::string::npos ||
        msg.find("normal Mach") != std::string::npos)
      throw AdmissibilityError(msg);
    throw NotSupersonicError(msg);
  }
  return sd;
}

double mu_f_coefficient(const RadialProfile& profile, double f_value) {
  // Composite Simpson line averages between r_sh and f.
  const double a = profile.r_sh(), b = f_value;
  auto gap_d = [&](double r) { return profile.d_prandtl_gap_dr(r); };
  auto du = [&](double r) { return profile.u_minus(r) - profile.u_plus(r); };
  double num = 0.0, den = 0.0;
  const int segs = 4;
  for (int s = 0; s < segs; ++s) {
    const double t0 = double(s) / segs, t1 = double(s + 1) / segs;
    const double x0 = a + (b - a) * t0, x1 = a + (b - a) * t1;
    const double xm = 0.5 * (x0 + x1);
    num += (t1 - t0) / 6.0 * (gap_d(x0) + 4.0 * gap_d(xm) + gap_d(x1));
    den += (t1 - t0) / 6.0 * (du(x0) + 4.0 * du(xm) + du(x1));
  }
  return num / den;
}

G1Data g1_data(const ShockData& sd, const ShockFront& front,
               const RadialProfile& profile, const UpstreamField& upstream,
               const std::vector<double>& chi_trace,
               const std::vector<Vec3>& grad_chi_trace,
               const std::vector<Vec3>& t_star_trace,
               const std::vector<Vec3>& f_star_trace) {
  const std::size_t n = sd.phi.size();
  G1Data out;
  out.g1.resize(n);
  out.mu_f.resize(n);
  out.j_residual.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = sd.phi[j];
    const double f = front(ph);
    const Vec3& nf = sd.n_f[j];
    const double u0p = profile.u_plus(f);
    const AijSample aij = aij_background(u0p, profile.gas());
    const double mu_f = mu_f_coefficient(profile, f);
    // Dirichlet defect of the current iterate.
    const double jres =
        upstream.phi_pot(f, ph) - profile.phi_plus(f) - chi_trace[j];
    // Normal-derivative target from the jump relation.
    const double R =
        sd.k_s[j] / sd.un_minus[j] - dot(t_star_trace[j], nf) - u0p * nf[0];
    // Tilt correction: difference between the full conormal flux of the
    // current iterate and its -a_rr (grad chi . n_f) leading part.
    const Vec3& gc = grad_chi_trace[j];
    const Vec3 a_grad = {aij.a_rr * gc[0], aij.a_pp * gc[1], 0.0};
    const double corr = -dot(a_grad, nf) + aij.a_rr * dot(gc, nf);
    out.g1[j] = -aij.a_rr * (R - mu_f * jres) + corr + dot(f_star_trace[j], nf);
    out.mu_f[j] = mu_f;
    out.j_residual[j] = jres;
  }
  return out;
}

FrontUpdate update_front(const ShockFront& front, const UpstreamField& upstream,
                         const RadialProfile& profile,
                         const std::vector<double>& chi_trace,
                         const std::vector<Vec3>& grad_chi_trace,
                         double omega, double box_lo, double box_hi) {
  const auto& ph = front.phi_nodes();
  const std::size_t n = ph.size();
  FrontUpdate out;
  std::vector<double> fnew(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double f = front(ph[j]);
    const double jres =
        upstream.phi_pot(f, ph[j]) - profile.phi_plus(f) - chi_trace[j];
    const double denom =
        upstream.dphi_dr(f, ph[j]) - profile.u_plus(f) - grad_chi_trace[j][0];
    if (!(denom > 0.0))
      throw Error("update_front: non-positive Newton denominator " +
                  std::to_string(denom) + " at phi = " + std::to_string(ph[j]));
    double fn = f - omega * jres / denom;
    if (fn < box_lo || fn > box_hi) {
      fn = std::clamp(fn, box_lo, box_hi);
      ++out.clipped;
    }
    fnew[j] = fn;
    out.j_residual_sup = std::max(out.j_residual_sup, std::fabs(jres));
    out.step_sup = std::max(out.step_sup, std::fabs(fn - f));
  }
  if (out.clipped * 10 > int(n))
    throw FrontOutOfRangeError(
        "update_front: " + std::to_string(out.clipped) + " of " +
        std::to_string(n) + " nodes clipped; the iteration is diverging");
  out.front = ShockFront(std::vector<double>(ph.begin(), ph.end()), std::move(fnew));
  return out;
}

}  // namespace nozzle
