#include "nozzle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nozzle/io.hpp"

namespace nozzle {

ShockFront::ShockFront(std::vector<double> phi_nodes,
                       std::vector<double> f_values)
    : spline_(std::move(phi_nodes), std::move(f_values),
              CubicSpline::End{true, 0.0}, CubicSpline::End{false, 0.0}) {}

ShockFront ShockFront::constant(double r, double phi0, int n_nodes) {
  std::vector<double> ph(n_nodes), fv(n_nodes, r);
  for (int j = 0; j < n_nodes; ++j) ph[j] = phi0 * double(j) / double(n_nodes - 1);
  return ShockFront(std::move(ph), std::move(fv));
}

double ShockFront::min_value() const {
  return *std::min_element(values().begin(), values().end());
}
double ShockFront::max_value() const {
  return *std::max_element(values().begin(), values().end());
}

std::array<double, 3> ShockFront::normal(double phi) const {
  const double f = (*this)(phi);
  const double fp = slope(phi);
  const double n = std::sqrt(1.0 / (f * f) + fp * fp);
  return {1.0 / (f * n), -fp / n, 0.0};
}

std::array<double, 3> ShockFront::tangent(double phi) const {
  const double f = (*this)(phi);
  const double fp = slope(phi);
  const double n = std::sqrt(1.0 / (f * f) + fp * fp);
  return {fp / n, 1.0 / (f * n), 0.0};
}

double FrontMap::map_point(double r, double phi) const {
  const double fv = (*f_)(phi);
  const double gv = (*g_)(phi);
  const double span = r_ex_ - std::min(fv, gv);
  if (r < fv - 1e-9 * span || r > r_ex_ + 1e-9 * span)
    throw OutOfDomainError("map_point: r = " + std::to_string(r) +
                           " outside [f(phi), r_ex] = [" + std::to_string(fv) +
                           ", " + std::to_string(r_ex_) + "]");
  return (r_ex_ - gv) / (r_ex_ - fv) * (r - r_ex_) + r_ex_;
}

Mat3 FrontMap::jacobian(double r, double phi) const {
  const double fv = (*f_)(phi);
  const double gv = (*g_)(phi);
  const double fp = f_->slope(phi);
  const double gp = g_->slope(phi);
  const double den = r_ex_ - fv;
  const double ratio = (r_ex_ - gv) / den;
  const double rt = map_point(r, phi);
  // d r_tilde / d r and d r_tilde / d phi at fixed r.
  const double drt_dr = ratio;
  const double drt_dphi = (-gp * den + (r_ex_ - gv) * fp) / (den * den) * (r - r_ex_);
  // Frame matrix dy_frame = M dx_frame in the orthonormal spherical frame.
  const double m00 = drt_dr, m01 = drt_dphi / r, m11 = rt / r, m22 = rt / r;
  // Embed at theta = 0: e_r = (sin,0,cos), e_phi = (cos,0,-sin), e_th = (0,1,0).
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double er[3] = {sp, 0.0, cp};
  const double ep[3] = {cp, 0.0, -sp};
  const double et[3] = {0.0, 1.0, 0.0};
  Mat3 J{};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      // dy_b/dx_a with dy = M dx expressed through the frame.
      double v = m00 * er[b] * er[a] + m01 * er[b] * ep[a] + m11 * ep[b] * ep[a] +
                 m22 * et[b] * et[a];
      J[a][b] = v;
    }
  }
  return J;
}

namespace {

// Second-order one-sided derivative; s is a signed stride into the interior.
inline double one_sided(const double* u, std::ptrdiff_t s, double h) {
  return (-1.5 * u[0] + 2.0 * u[s] - 0.5 * u[2 * s]) / h;
}

}  // namespace

Field d_drt(const Field& u, const MappedGrid& g, par::ExecMode mode) {
  Field out(u.size());
  const int np = g.npn();
  const double h = g.hr();
  par::parallel_for(
      g.n_nodes(),
      [&](std::size_t n) {
        const int i = int(n) / np;
        if (i == 0)
          out[n] = one_sided(&u[n], np, h);
        else if (i == g.nr)
          out[n] = one_sided(&u[n], -np, -h);
        else
          out[n] = (u[n + np] - u[n - np]) / (2.0 * h);
      },
      mode);
  return out;
}

Field d_dphi(const Field& u, const MappedGrid& g, par::ExecMode mode) {
  Field out(u.size());
  const int np = g.npn();
  const double h = g.hphi();
  par::parallel_for(
      g.n_nodes(),
      [&](std::size_t n) {
        const int j = int(n) % np;
        if (j == 0)
          out[n] = one_sided(&u[n], 1, h);
        else if (j == g.nphi)
          out[n] = one_sided(&u[n], -1, -h);
        else
          out[n] = (u[n + 1] - u[n - 1]) / (2.0 * h);
      },
      mode);
  return out;
}

const std::array<double, 3> kExtensionCoeffs = {6.0, -32.0, 27.0};

double ColumnInterp::operator()(double x) const {
  const double t = (x - x0_) / h_;
  int base = int(std::floor(t)) - 1;
  base = std::clamp(base, 0, n_ - 4);
  const double s = t - base;
  // 4-point Lagrange weights at offsets 0..3.
  const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return w0 * v_[base * stride_] + w1 * v_[(base + 1) * stride_] +
         w2 * v_[(base + 2) * stride_] + w3 * v_[(base + 3) * stride_];
}

double extended_eval(const ColumnInterp& column, double r_sh, double rt) {
  if (rt >= r_sh) return column(rt);
  const double d = r_sh - rt;
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    v += kExtensionCoeffs[i] * column(r_sh + d / double(i + 1));
  return v;
}

std::vector<double> extend_column(const std::vector<double>& values, double r_sh,
                                  double h, int n_ghost) {
  const ColumnInterp col(r_sh, h, values.data(), int(values.size()));
  std::vector<double> ghosts(n_ghost);
  for (int k = 1; k <= n_ghost; ++k)
    ghosts[k - 1] = extended_eval(col, r_sh, r_sh - k * h);
  return ghosts;
}

Field remap_between_fronts(const Field& u, const ShockFront& f_old,
                           const ShockFront& f_new, const MappedGrid& g,
                           par::ExecMode mode) {
  Field out(u.size());
  const int np = g.npn();
  par::parallel_for(
      std::size_t(np),
      [&](std::size_t j) {
        const double ph = g.phi(int(j));
        const ColumnInterp cs(g.r_sh, g.hr(), &u[g.idx(0, int(j))], g.nrn(), np);
        const double fo = f_old(ph), fn = f_new(ph);
        const double scale = (g.r_ex - fn) / (g.r_ex - fo);
        for (int i = 0; i < g.nrn(); ++i) {
          // Physical point under f_new, re-expressed in f_old coordinates.
          const double rt_old = g.r_ex + scale * (g.r_tilde(i) - g.r_ex);
          out[g.idx(i, int(j))] = extended_eval(cs, g.r_sh, rt_old);
        }
      },
      mode);
  return out;
}

namespace {

struct NormPoint {
  double r, z;  // flattened physical-like coordinates (r_tilde, r_bar * phi)
  double delta;
};

double edge_distance(const MappedGrid& g, double rt, double ph, NormEdge edge) {
  // Arc-length distance to the weighted boundary portion, physical metric
  // approximated with the mapped radius.
  const double wall = rt * (g.phi0 - ph);
  if (edge == NormEdge::Wall) return wall;
  // Corner {r = r_sh} x {phi = phi0}.
  const double dr = rt - g.r_sh;
  return std::sqrt(wall * wall + dr * dr);
}

}  // namespace

double weighted_norm(const Field& u, int m, double k, double alpha,
                     const MappedGrid& g, NormEdge edge, par::ExecMode mode) {
  // Nodal derivative arrays up to order m (physical components, front frozen
  // at r_sh for this diagnostic).
  std::vector<Field> derivs;
  derivs.push_back(u);
  if (m >= 1) {
    Field dr = d_drt(u, g, mode);
    Field dp = d_dphi(u, g, mode);
    const int np = g.npn();
    par::parallel_for(
        g.n_nodes(),
        [&](std::size_t n) {
          const int i = int(n) / np;
          dp[n] /= std::max(g.r_tilde(i), 1e-300);
        },
        mode);
    derivs.push_back(std::move(dr));
    derivs.push_back(std::move(dp));
  }
  const int np = g.npn();
  auto delta_at = [&](std::size_t n) {
    const int i = int(n) / np, j = int(n) % np;
    return edge_distance(g, g.r_tilde(i), g.phi(j), edge);
  };

  double sup_part = 0.0;
  for (std::size_t order = 0; order < derivs.size(); ++order) {
    const double exponent = std::max((order > 0 ? 1.0 : 0.0) + k, 0.0);
    const Field& d = derivs[order];
    std::vector<double> weighted(d.size());
    par::parallel_for(
        d.size(),
        [&](std::size_t n) {
          weighted[n] = std::pow(delta_at(n), exponent) * std::fabs(d[n]);
        },
        mode);
    sup_part = std::max(sup_part, par::max_abs(weighted.data(), weighted.size(), mode));
  }

  // Sampled Hoelder quotient of the highest derivatives.
  const double hexp = std::max(double(m) + alpha + k, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const int nrn = g.nrn();
  for (int i = 0; i < nrn; ++i)
    for (int j = 0; j < np; ++j)
      for (int di = 0; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj) {
          if (di == 0 && dj <= 0) continue;
          const int i2 = i + di, j2 = j + dj;
          if (i2 >= nrn || j2 < 0 || j2 >= np) continue;
          pairs.emplace_back(g.idx(i, j), g.idx(i2, j2));
        }
  std::mt19937 rng(12345);
  std::uniform_int_distribution<std::size_t> pick(0, g.n_nodes() - 1);
  for (int s = 0; s < 200; ++s) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a != b) pairs.emplace_back(a, b);
  }
  auto coords = [&](std::size_t n) {
    const int i = int(n) / np, j = int(n) % np;
    const double rt = g.r_tilde(i), ph = g.phi(j);
    return std::pair<double, double>{rt, 0.5 * (g.r_sh + g.r_ex) * ph};
  };
  const std::vector<const Field*> tops =
      m == 0 ? std::vector<const Field*>{&derivs[0]}
             : std::vector<const Field*>{&derivs[1], &derivs[2]};
  std::vector<double> quot(pairs.size(), 0.0);
  par::parallel_for(
      pairs.size(),
      [&](std::size_t pidx) {
        const auto [na, nb] = pairs[pidx];
        const auto [xa, ya] = coords(na);
        const auto [xb, yb] = coords(nb);
        const double dist = std::hypot(xa - xb, ya - yb);
        if (dist <= 0.0) return;
        const double dmin = std::min(delta_at(na), delta_at(nb));
        double q = 0.0;
        for (const Field* f : tops)
          q = std::max(q, std::fabs((*f)[na] - (*f)[nb]));
        quot[pidx] = std::pow(dmin, hexp) * q / std::pow(dist, alpha);
      },
      mode);
  const double semi = par::max_abs(quot.data(), quot.size(), mode);
  return sup_part + semi;
}

double weighted_norm_1d(const std::vector<double>& phi_nodes,
                        const std::vector<double>& values, int m, double k,
                        double alpha) {
  const std::size_t n = phi_nodes.size();
  const double phi0 = phi_nodes.back();
  std::vector<std::vector<double>> derivs{values};
  if (m >= 1) {
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0)
        d[j] = (values[1] - values[0]) / (phi_nodes[1] - phi_nodes[0]);
      else if (j + 1 == n)
        d[j] = (values[j] - values[j - 1]) / (phi_nodes[j] - phi_nodes[j - 1]);
      else
        d[j] = (values[j + 1] - values[j - 1]) / (phi_nodes[j + 1] - phi_nodes[j - 1]);
    }
    derivs.push_back(std::move(d));
  }
  double sup_part = 0.0;
  for (std::size_t order = 0; order < derivs.size(); ++order) {
    const double exponent = std::max(double(order) + k, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      sup_part = std::max(sup_part, std::pow(phi0 - phi_nodes[j], exponent) *
                                        std::fabs(derivs[order][j]));
  }
  const double hexp = std::max(double(m) + alpha + k, 0.0);
  double semi = 0.0;
  const auto& top = derivs.back();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dist = phi_nodes[b] - phi_nodes[a];
      const double dmin = std::min(phi0 - phi_nodes[a], phi0 - phi_nodes[b]);
      semi = std::max(semi, std::pow(dmin, hexp) *
                                std::fabs(top[a] - top[b]) / std::pow(dist, alpha));
    }
  return sup_part + semi;
}

void write_front_csv(const std::string& path, const ShockFront& f) {
  std::string body = "phi,f\n";
  const auto& ph = f.phi_nodes();
  const auto& fv = f.values();
  for (std::size_t j = 0; j < ph.size(); ++j)
    body += format_csv_row({ph[j], fv[j]});
  write_file_atomic(path, body);
}

}  // namespace nozzle
