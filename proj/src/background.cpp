#include "nozzle/background.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "nozzle/io.hpp"

namespace nozzle {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> chebyshev_nodes(double a, double b, int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    const double c = std::cos(kPi * double(n - 1 - k) / double(n - 1));
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * c;
  }
  x.front() = a;
  x.back() = b;
  return x;
}

// Chebyshev-style nodes on [a, b] with `split` forced to be a knot, so that
// branch values there are root-finder-exact rather than interpolated.
std::vector<double> split_nodes(double a, double split, double b, int n) {
  if (split <= a + 1e-12 * (b - a) || split >= b - 1e-12 * (b - a))
    return chebyshev_nodes(a, b, n);
  const int n_lo = std::max(
      5, int(std::lround(double(n) * (split - a) / (b - a))) | 1);
  const auto lo = chebyshev_nodes(a, split, n_lo);
  const auto hi = chebyshev_nodes(split, b, n);
  std::vector<double> x(lo.begin(), lo.end());
  x.insert(x.end(), hi.begin() + 1, hi.end());
  return x;
}
}  // namespace

void NozzleGeom::validate() const {
  if (!(0.0 < r_en && r_en < r_ex))
    throw Error("nozzle geometry: need 0 < r_en < r_ex");
  if (!(0.0 < phi0 && phi0 < 0.5 * kPi))
    throw Error("nozzle geometry: need 0 < phi0 < pi/2");
}

void EntranceData::validate(const GasModel& gas) const {
  if (!(rho_en > 0.0 && p_en > 0.0 && u_en > 0.0))
    throw Error("entrance data: rho, u, p must be positive");
  const double c = std::sqrt(gas.gamma * p_en / rho_en);
  if (!(u_en > c))
    throw NotSupersonicError("entrance data: u_en = " + std::to_string(u_en) +
                             " <= sound speed " + std::to_string(c));
}

double brent(const std::function<double(double)>& f, double a, double b,
             double rel_tol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa * fb > 0.0) throw Error("brent: endpoints do not bracket a root");
  if (std::fabs(fa) < std::fabs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a;
  bool mflag = true;
  for (int it = 0; it < max_iter; ++it) {
    const double tol = rel_tol * std::max(1.0, std::fabs(b));
    if (fb == 0.0 || std::fabs(b - a) < tol) return b;
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double lo = std::min(b, (3.0 * a + b) / 4.0);
    const double hi = std::max(b, (3.0 * a + b) / 4.0);
    const bool bad = (s < lo || s > hi) ||
                     (mflag && std::fabs(s - b) >= 0.5 * std::fabs(b - c)) ||
                     (!mflag && std::fabs(s - b) >= 0.5 * std::fabs(c - d)) ||
                     (mflag && std::fabs(b - c) < tol) ||
                     (!mflag && std::fabs(c - d) < tol);
    if (bad) {
      s = 0.5 * (a + b);
      mflag = true;
    } else {
      mflag = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if (fa * fs < 0.0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::fabs(fa) < std::fabs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

double radial_state(double r, double m, double entropy, Branch branch,
                    const GasModel& gas) {
  const double u_star = std::sqrt(gas.k0());
  const double u_max = std::sqrt(2.0 * gas.b0 * (1.0 - 1e-9));
  auto mass = [&](double u) {
    return r * r * density_closure_q2(entropy, u * u, gas) * u - m;
  };
  const double peak = mass(u_star) + m;
  if (peak < m * (1.0 - 1e-12))
    throw ChokedError("radial_state: peak mass flux " + std::to_string(peak) +
                      " at r = " + std::to_string(r) + " is below m = " +
                      std::to_string(m));
  if (peak <= m * (1.0 + 1e-12)) return u_star;
  if (branch == Branch::Supersonic) return brent(mass, u_star, u_max, 1e-13);
  return brent(mass, 1e-14 * u_max, u_star, 1e-13);
}

PrimState rh_jump(const PrimState& minus, const GasModel& gas) {
  if (mach(minus, gas) <= 1.0)
    throw NotSupersonicError("rh_jump: upstream state is not supersonic");
  const GasModel g{gas.gamma, bernoulli(minus, gas)};
  const double k0 = g.k0();
  const double um = minus.vel[0];
  const double up = k0 / um;
  const double pp = minus.rho * um * um + minus.p - minus.rho * k0;
  const double rp = minus.rho * um / up;
  return PrimState{rp, {up, 0.0, 0.0}, pp};
}

RadialProfile::RadialProfile(const NozzleGeom& geom,
                             const EntranceData& entrance, double r_sh,
                             const GasModel& gas_hint, int nodes_per_branch,
                             double extend_below)
    : geom_(geom), r_sh_(r_sh) {
  geom.validate();
  if (!(geom.r_en <= r_sh && r_sh <= geom.r_ex))
    throw Error("RadialProfile: r_sh outside [r_en, r_ex]");
  const PrimState en{entrance.rho_en, {entrance.u_en, 0.0, 0.0}, entrance.p_en};
  gas_ = GasModel{gas_hint.gamma, bernoulli(en, gas_hint)};
  entrance.validate(gas_);
  m_ = geom.r_en * geom.r_en * entrance.rho_en * entrance.u_en;
  s_minus_ = entrance.p_en / std::pow(entrance.rho_en, gas_.gamma);

  // Supersonic branch on the whole nozzle, with r_sh as a knot.
  const auto rm = split_nodes(geom.r_en, r_sh, geom.r_ex, nodes_per_branch);
  std::vector<double> um(rm.size());
  for (std::size_t i = 0; i < rm.size(); ++i)
    um[i] = radial_state(rm[i], m_, s_minus_, Branch::Supersonic, gas_);
  u_m_ = CubicSpline(rm, um);

  // Jump at the shock, then the subsonic branch. It may choke upstream of
  // r_sh - extend_below; shrink the extension band in that case.
  const PrimState sp = rh_jump(state_minus(r_sh), gas_);
  s_plus_ = sp.p / std::pow(sp.rho, gas_.gamma);
  double r_lo = std::max(geom.r_en, r_sh - extend_below);
  const double u_star = std::sqrt(gas_.k0());
  auto chokes = [&](double r) {
    return r * r * density_closure_q2(s_plus_, u_star * u_star, gas_) * u_star <
           m_ * (1.0 + 1e-9);
  };
  if (r_lo < r_sh && chokes(r_lo)) {
    double lo = r_lo, hi = r_sh;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (chokes(mid) ? lo : hi) = mid;
    }
    r_lo = std::min(hi + 1e-6 * (geom.r_ex - geom.r_en), r_sh);
  }
  r_plus_min_ = r_lo;
  const int np = std::max(9, nodes_per_branch);
  const auto rp = r_lo < geom.r_ex
                      ? split_nodes(r_lo, r_sh, geom.r_ex, np)
                      : std::vector<double>{geom.r_ex - 1e-9, geom.r_ex};
  std::vector<double> up(rp.size());
  for (std::size_t i = 0; i < rp.size(); ++i)
    up[i] = radial_state(rp[i], m_, s_plus_, Branch::Subsonic, gas_);
  u_p_ = CubicSpline(rp, up);

  // Potentials, exact integrals of the velocity splines, zero at the shock.
  std::vector<double> pm(rm.size()), pp(rp.size());
  const double im0 = u_m_.integral(r_sh_);
  for (std::size_t i = 0; i < rm.size(); ++i)
    pm[i] = u_m_.integral(rm[i]) - im0;
  const double ip0 = u_p_.integral(r_sh_);
  for (std::size_t i = 0; i < rp.size(); ++i)
    pp[i] = u_p_.integral(rp[i]) - ip0;
  phi_m_ = CubicSpline(rm, pm);
  phi_p_ = CubicSpline(rp, pp);
}

double RadialProfile::dudr(double u, double r) const {
  const double c2 = (gas_.gamma - 1.0) * (gas_.b0 - 0.5 * u * u);
  const double m2 = u * u / c2;
  return -2.0 * u / (r * (1.0 - m2));
}

double RadialProfile::rho_minus(double r) const {
  return density_closure_q2(s_minus_, u_m_(r) * u_m_(r), gas_);
}
double RadialProfile::rho_plus(double r) const {
  return density_closure_q2(s_plus_, u_p_(r) * u_p_(r), gas_);
}
double RadialProfile::p_minus(double r) const {
  return s_minus_ * std::pow(rho_minus(r), gas_.gamma);
}
double RadialProfile::p_plus(double r) const {
  return s_plus_ * std::pow(rho_plus(r), gas_.gamma);
}
double RadialProfile::mach_minus(double r) const {
  return mach(state_minus(r), gas_);
}
double RadialProfile::mach_plus(double r) const {
  return mach(state_plus(r), gas_);
}

PrimState RadialProfile::state_minus(double r) const {
  return {rho_minus(r), {u_minus(r), 0.0, 0.0}, p_minus(r)};
}
PrimState RadialProfile::state_plus(double r) const {
  return {rho_plus(r), {u_plus(r), 0.0, 0.0}, p_plus(r)};
}

double RadialProfile::d_prandtl_gap_dr(double r) const {
  const double um = u_minus(r);
  return -gas_.k0() * dudr_minus(r) / (um * um) - dudr_plus(r);
}

void RadialProfile::write_csv(const std::string& path, int samples) const {
  std::string body = "r,rho,u,p,mach,S\n";
  for (int i = 0; i < samples; ++i) {
    const double r =
        geom_.r_en + (geom_.r_ex - geom_.r_en) * double(i) / double(samples - 1);
    const bool minus = r < r_sh_;
    const PrimState s = minus ? state_minus(r) : state_plus(r);
    body += format_csv_row({r, s.rho, s.vel[0], s.p, mach(s, gas_),
                            minus ? s_minus_ : s_plus_});
  }
  write_file_atomic(path, body);
}

RadialProfile profile_for_shock(const NozzleGeom& geom,
                                const EntranceData& entrance, double r_sh,
                                const GasModel& gas) {
  return RadialProfile(geom, entrance, r_sh, gas);
}

ExitPressureRange exit_pressure_range(const NozzleGeom& geom,
                                      const EntranceData& entrance,
                                      const GasModel& gas) {
  const RadialProfile at_exit(geom, entrance, geom.r_ex, gas);
  const RadialProfile at_entrance(geom, entrance, geom.r_en, gas);
  return {at_exit.p_plus(geom.r_ex), at_entrance.p_plus(geom.r_ex)};
}

double shock_from_exit_pressure(const NozzleGeom& geom,
                                const EntranceData& entrance, double p_c,
                                const GasModel& gas) {
  const ExitPressureRange range = exit_pressure_range(geom, entrance, gas);
  if (!(range.p_min < p_c && p_c < range.p_max))
    throw PressureOutOfRangeError(
        "shock_from_exit_pressure: p_c = " + std::to_string(p_c) +
            " outside (" + std::to_string(range.p_min) + ", " +
            std::to_string(range.p_max) + ")",
        range.p_min, range.p_max);
  auto exit_p = [&](double r_sh) {
    return RadialProfile(geom, entrance, r_sh, gas, 129).p_plus(geom.r_ex);
  };
  // p_plus(r_ex; r_sh) decreases in r_sh: bisect.
  double lo = geom.r_en, hi = geom.r_ex;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (exit_p(mid) > p_c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nozzle
