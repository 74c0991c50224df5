#include "nozzle/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nozzle {

double StreamFunctionField::w_at(double rt, double phi) const {
  const MappedGrid& g = grid;
  const double ti = std::clamp((rt - g.r_sh) / g.hr(), 0.0, double(g.nr));
  const double tj = std::clamp(phi / g.hphi(), 0.0, double(g.nphi));
  const int i = std::min(int(ti), g.nr - 1);
  const int j = std::min(int(tj), g.nphi - 1);
  const double xi = ti - i, eta = tj - j;
  return (1 - xi) * (1 - eta) * w[g.idx(i, j)] + xi * (1 - eta) * w[g.idx(i + 1, j)] +
         (1 - xi) * eta * w[g.idx(i, j + 1)] + xi * eta * w[g.idx(i + 1, j + 1)];
}

StreamFunctionField build_stream_function(const Field& flux_r,
                                          const Field& flux_phi,
                                          const ShockFront& front,
                                          const MappedGrid& grid,
                                          par::ExecMode mode) {
  StreamFunctionField sf;
  sf.grid = grid;
  const std::size_t nn = grid.n_nodes();
  sf.a_rt.assign(nn, 0.0);
  sf.a_phi.assign(nn, 0.0);
  sf.nu.assign(nn, 0.0);
  const int np = grid.npn();
  par::parallel_for(
      nn,
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double rt = grid.r_tilde(i), ph = grid.phi(j);
        const double f = front(ph);
        const double span = grid.r_ex - f;
        const double a = grid.physical_r(front, rt, ph);
        const double b = grid.map_b(front, ph);
        const double c = grid.map_c(front, rt, ph);
        const double sp = std::sin(ph);
        const double nu = span * a * (a * flux_r[n] * b + flux_phi[n] * c);
        sf.nu[n] = nu;
        sf.a_rt[n] = sp * nu;
        sf.a_phi[n] = span * a * sp * flux_phi[n];
      },
      mode);
  sf.nu_min = sf.nu[0];
  for (std::size_t n = 0; n < nn; ++n) sf.nu_min = std::min(sf.nu_min, sf.nu[n]);
  if (!(sf.nu_min > 0.0))
    throw ReversedFlowError(
        "build_stream_function: A_rt/sin(phi) reaches " +
        std::to_string(sf.nu_min) + "; downstream mass flux reversed");

  // Row-wise trapezoid integral in phi.
  sf.w.assign(nn, 0.0);
  const double hp = grid.hphi();
  par::parallel_for(
      std::size_t(grid.nrn()),
      [&](std::size_t i) {
        double acc = 0.0;
        sf.w[grid.idx(int(i), 0)] = 0.0;
        for (int j = 1; j < np; ++j) {
          acc += 0.5 * hp *
                 (sf.a_rt[grid.idx(int(i), j - 1)] + sf.a_rt[grid.idx(int(i), j)]);
          sf.w[grid.idx(int(i), j)] = acc;
        }
      },
      mode);
  sf.g_table.resize(np);
  for (int j = 0; j < np; ++j) sf.g_table[j] = sf.w[grid.idx(0, j)];
  double dev = 0.0;
  const double total = sf.g_table[np - 1];
  for (int i = 0; i <= grid.nr; ++i)
    dev = std::max(dev, std::fabs(sf.w[grid.idx(i, np - 1)] - total));
  sf.total_flux_dev = dev / std::max(1e-300, std::fabs(total));
  return sf;
}

double footpoint(const StreamFunctionField& sf, double rt, double phi) {
  const MappedGrid& g = sf.grid;
  const double wv = sf.w_at(rt, phi);
  const auto& gt = sf.g_table;
  const int np = g.npn();
  if (wv <= 0.0) return 0.0;
  if (wv >= gt[np - 1]) return g.phi0;
  // Bracket on the monotone table.
  int lo = 0, hi = np - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (gt[mid] <= wv ? lo : hi) = mid;
  }
  // Secant polish on a local monotone-cubic model of G.
  const int j0 = std::max(0, lo - 1), j1 = std::min(np - 1, hi + 2);
  std::vector<double> xs, ys;
  for (int j = j0; j <= j1; ++j) {
    xs.push_back(g.phi(j));
    ys.push_back(gt[j]);
  }
  const MonotoneCubic local(xs, ys);
  double a = g.phi(lo), b = g.phi(hi);
  double fa = gt[lo] - wv, fb = gt[hi] - wv;
  double x = (a * fb - b * fa) / (fb - fa);
  const double tol = 1e-12 * std::max(1.0, gt[np - 1]);
  for (int it = 0; it < 100; ++it) {
    const double fx = local(x) - wv;
    if (std::fabs(fx) < tol) break;
    if (fa * fx < 0.0) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
    const double xs_ = (a * fb - b * fa) / (fb - fa);
    x = (xs_ > a && xs_ < b) ? xs_ : 0.5 * (a + b);
  }
  return std::clamp(x, 0.0, g.phi0);
}

TransportSolution transport_scalar(const CubicSpline& shock_data,
                                   const StreamFunctionField& sf,
                                   par::ExecMode mode) {
  const MappedGrid& g = sf.grid;
  const std::size_t nn = g.n_nodes();
  TransportSolution out;
  out.value.assign(nn, 0.0);
  out.dvalue_dphi.assign(nn, 0.0);
  out.foot.assign(nn, 0.0);
  const int np = g.npn();
  // nu along the shock row, for the footpoint chain rule.
  std::vector<double> phi_nodes(np), nu0(np);
  for (int j = 0; j < np; ++j) {
    phi_nodes[j] = g.phi(j);
    nu0[j] = sf.nu[g.idx(0, j)];
  }
  const CubicSpline nu0_spline(phi_nodes, nu0);
  par::parallel_for(
      nn,
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double ph = g.phi(j);
        const double k = (i == 0) ? ph : footpoint(sf, g.r_tilde(i), ph);
        out.foot[n] = k;
        out.value[n] = shock_data(k);
        // dK/dphi = A_rt(rt, phi) / A_rt(r_sh, K); on the axis the ratio of
        // the sin factors tends to sqrt(nu/nu0).
        double dk;
        const double sp = std::sin(ph), sk = std::sin(k);
        if (sp < 1e-12 || sk < 1e-12) {
          dk = std::sqrt(std::max(sf.nu[n], 0.0) / std::max(nu0_spline(k), 1e-300));
        } else {
          dk = (sp * sf.nu[n]) / (sk * nu0_spline(k));
        }
        out.dvalue_dphi[n] = shock_data.deriv(k) * dk;
      },
      mode);
  // Observed bi-Lipschitz bounds of K against the wall angle.
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= g.nr; ++i)
    for (int j = 0; j + 1 < np; ++j) {
      const double dk = (out.foot[g.idx(i, j + 1)] - out.foot[g.idx(i, j)]) / g.hphi();
      lo = std::min(lo, dk);
      hi = std::max(hi, dk);
    }
  out.mu_star_lo = lo;
  out.mu_star_hi = hi;
  return out;
}

}  // namespace nozzle
