#include <cmath>
#include <vector>

#include "doctest.h"
#include "nozzle/background.hpp"

using namespace nozzle;

namespace {

const NozzleGeom kGeom{1.0, 3.0, 0.5235987755982988};
const EntranceData kEntrance{1.0, 2.0, 0.5};
const GasModel kGas{1.4, 1.0};  // b0 is derived from the entrance data

// Independent oracle for the branch solve: dense scan of the mass-flux
// function refined by plain bisection.
double scan_oracle(double r, double m, double S, Branch branch,
                   const GasModel& gas) {
  const double u_star = std::sqrt(gas.k0());
  const double u_hi = std::sqrt(2.0 * gas.b0) * (1.0 - 1e-12);
  auto mass = [&](double u) {
    const double br = (gas.gamma - 1.0) / (gas.gamma * S) * (gas.b0 - 0.5 * u * u);
    return r * r * std::pow(br, 1.0 / (gas.gamma - 1.0)) * u - m;
  };
  double lo = branch == Branch::Supersonic ? u_star : 1e-12;
  double hi = branch == Branch::Supersonic ? u_hi : u_star;
  const int scan = 20000;
  double a = lo, b = hi;
  double fa = mass(a);
  for (int k = 1; k <= scan; ++k) {
    const double x = lo + (hi - lo) * double(k) / scan;
    const double fx = mass(x);
    if (fa * fx <= 0.0) {
      b = x;
      break;
    }
    a = x;
    fa = fx;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mass(a) * mass(mid) <= 0.0)
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("radial branch solve round-trips the entrance data") {
  const PrimState en{kEntrance.rho_en, {kEntrance.u_en, 0, 0}, kEntrance.p_en};
  const GasModel gas{kGas.gamma, bernoulli(en, kGas)};
  CHECK(gas.b0 == doctest::Approx(3.75).epsilon(1e-15));
  const double m = 1.0 * 1.0 * 2.0;
  const double S = 0.5;
  const double u = radial_state(1.0, m, S, Branch::Supersonic, gas);
  CHECK(u == doctest::Approx(2.0).epsilon(1e-10));
  const double rho = density_closure_q2(S, u * u, gas);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(S * std::pow(rho, gas.gamma) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("branches meet at the sonic peak") {
  const GasModel gas{1.4, 3.75};
  const double S = 0.5;
  const double u_star = std::sqrt(gas.k0());
  const double r = 1.3;
  const double m_peak =
      r * r * density_closure_q2(S, u_star * u_star, gas) * u_star;
  CHECK(radial_state(r, m_peak, S, Branch::Supersonic, gas) ==
        doctest::Approx(u_star).epsilon(1e-10));
  CHECK(radial_state(r, m_peak, S, Branch::Subsonic, gas) ==
        doctest::Approx(u_star).epsilon(1e-10));
  CHECK_THROWS_AS(radial_state(r, m_peak * 1.001, S, Branch::Subsonic, gas),
                  ChokedError);
}

TEST_CASE("supersonic branch against the dense-scan oracle") {
  const GasModel gas{1.4, 3.75};
  const double m = 2.0, S = 0.5;
  const double got = radial_state(2.0, m, S, Branch::Supersonic, gas);
  const double want = scan_oracle(2.0, m, S, Branch::Supersonic, gas);
  CHECK(got == doctest::Approx(want).epsilon(1e-11));
  // High-precision external reference for the same root.
  CHECK(got == doctest::Approx(2.3710930103529151).epsilon(1e-12));
}

TEST_CASE("jump relations: Prandtl product and exact reference values") {
  const GasModel gas{1.4, 1.0};
  const PrimState minus{1.0, {2.0, 0, 0}, 0.5};
  const PrimState plus = rh_jump(minus, gas);
  const double b0 = bernoulli(minus, gas);
  const double k0 = 2.0 * 0.4 * b0 / 2.4;
  CHECK(plus.vel[0] * minus.vel[0] == doctest::Approx(k0).epsilon(1e-14));
  // (rho, u, p) = (3.2, 0.625, 3.25) exactly for this state.
  CHECK(plus.vel[0] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(plus.p == doctest::Approx(3.25).epsilon(1e-14));
  CHECK(plus.rho == doctest::Approx(3.2).epsilon(1e-14));
  CHECK(mach(plus, gas) < 1.0);
  CHECK(bernoulli(plus, gas) == doctest::Approx(b0).epsilon(1e-14));
  CHECK(minus.vel[0] > plus.vel[0]);
  CHECK(plus.vel[0] > 0.0);
}

TEST_CASE("jump relations against an independent three-equation solve") {
  // Oracle: Newton iteration on the raw conservation system
  // [rho u] = 0, [rho u^2 + p] = 0, [B] = 0 for the subsonic root.
  const GasModel gas{1.4, 1.0};
  const PrimState minus{1.0, {2.0, 0, 0}, 0.5};
  const double mflux = minus.rho * minus.vel[0];
  const double mom = minus.rho * minus.vel[0] * minus.vel[0] + minus.p;
  const double b0 = bernoulli(minus, gas);
  // Unknown u+: rho+ = mflux/u, p+ = mom - mflux u; B(u) = B0.
  auto res = [&](double u) {
    const double rho = mflux / u;
    const double p = mom - mflux * u;
    return 0.5 * u * u + gas.gamma * p / ((gas.gamma - 1.0) * rho) - b0;
  };
  double a = 0.05, b = 1.1;  // subsonic bracket below u*
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (res(a) * res(mid) <= 0.0)
      b = mid;
    else
      a = mid;
  }
  const double u_oracle = 0.5 * (a + b);
  const PrimState plus = rh_jump(minus, gas);
  CHECK(plus.vel[0] == doctest::Approx(u_oracle).epsilon(1e-10));
  CHECK(plus.rho == doctest::Approx(mflux / u_oracle).epsilon(1e-9));
  CHECK(plus.p == doctest::Approx(mom - mflux * u_oracle).epsilon(1e-9));
}

TEST_CASE("sonic upstream gives the identity jump") {
  const GasModel gas0{1.4, 3.75};
  const double u_star = std::sqrt(gas0.k0());
  // Build a state with u slightly above sonic so it's formally supersonic.
  const double u = u_star * (1.0 + 1e-9);
  const double S = 0.7;
  const double rho = density_closure_q2(S, u * u, gas0);
  const PrimState minus{rho, {u, 0, 0}, S * std::pow(rho, gas0.gamma)};
  const PrimState plus = rh_jump(minus, gas0);
  CHECK(plus.vel[0] == doctest::Approx(u).epsilon(1e-6));
  CHECK(plus.rho == doctest::Approx(rho).epsilon(1e-6));
  CHECK(plus.p == doctest::Approx(minus.p).epsilon(1e-6));
  CHECK_THROWS_AS(
      rh_jump(PrimState{1.0, {0.5, 0, 0}, 1.0}, GasModel{1.4, 1.0}),
      NotSupersonicError);
}

TEST_CASE("profile conserves mass flux and the Bernoulli constant") {
  const RadialProfile prof(kGeom, kEntrance, 1.5, kGas);
  const GasModel& gas = prof.gas();
  CHECK(prof.mass_flux() == doctest::Approx(2.0).epsilon(1e-14));
  // At the tabulated nodes the branch values are root-finder-exact.
  for (double r : prof.knots_minus()) {
    const PrimState sm = prof.state_minus(r);
    CHECK(r * r * sm.rho * sm.vel[0] ==
          doctest::Approx(prof.mass_flux()).epsilon(1e-10));
    CHECK(bernoulli(sm, gas) == doctest::Approx(gas.b0).epsilon(1e-10));
    CHECK(prof.mach_minus(r) > 1.0);
  }
  for (double r : prof.knots_plus()) {
    const PrimState sp = prof.state_plus(r);
    CHECK(r * r * sp.rho * sp.vel[0] ==
          doctest::Approx(prof.mass_flux()).epsilon(1e-10));
    CHECK(bernoulli(sp, gas) == doctest::Approx(gas.b0).epsilon(1e-10));
    CHECK(prof.mach_plus(r) < 1.0);
  }
  // Off-node queries interpolate; Bernoulli stays exact by the closure and
  // the mass-flux defect is bounded by the interpolation error.
  for (int i = 0; i <= 50; ++i) {
    const double r = 1.0 + 2.0 * i / 50.0;
    const PrimState sm = prof.state_minus(r);
    CHECK(bernoulli(sm, gas) == doctest::Approx(gas.b0).epsilon(1e-12));
    CHECK(r * r * sm.rho * sm.vel[0] ==
          doctest::Approx(prof.mass_flux()).epsilon(2e-5));
    if (r >= prof.r_plus_min()) {
      const PrimState sp = prof.state_plus(r);
      CHECK(bernoulli(sp, gas) == doctest::Approx(gas.b0).epsilon(1e-12));
      CHECK(r * r * sp.rho * sp.vel[0] ==
            doctest::Approx(prof.mass_flux()).epsilon(2e-5));
    }
  }
}

TEST_CASE("profile branch monotonicity") {
  const RadialProfile prof(kGeom, kEntrance, 1.5, kGas);
  double um = 0.0, up = 1e9, rhom = 1e9, rhop = 0.0, pm = 1e9, pp = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double r = 1.0 + 2.0 * i / 40.0;
    CHECK(prof.u_minus(r) > um);
    CHECK(prof.rho_minus(r) < rhom);
    CHECK(prof.p_minus(r) < pm);
    um = prof.u_minus(r);
    rhom = prof.rho_minus(r);
    pm = prof.p_minus(r);
    if (r >= 1.5) {
      CHECK(prof.u_plus(r) < up);
      CHECK(prof.rho_plus(r) > rhop);
      CHECK(prof.p_plus(r) > pp);
      up = prof.u_plus(r);
      rhop = prof.rho_plus(r);
      pp = prof.p_plus(r);
    }
  }
  // Admissibility at the shock.
  CHECK(prof.u_minus(1.5) > prof.u_plus(1.5));
  CHECK(prof.u_plus(1.5) > 0.0);
  // Potentials are normalized at the shock and consistent with u.
  CHECK(prof.phi_minus(1.5) == doctest::Approx(0.0));
  CHECK(prof.phi_plus(1.5) == doctest::Approx(0.0));
  const double h = 1e-6;
  CHECK((prof.phi_plus(2.0 + h) - prof.phi_plus(2.0 - h)) / (2.0 * h) ==
        doctest::Approx(prof.u_plus(2.0)).epsilon(1e-7));
}

TEST_CASE("closed-form branch slope matches finite differences") {
  const RadialProfile prof(kGeom, kEntrance, 1.5, kGas);
  const double h = 1e-6;
  for (double r : {1.7, 2.2, 2.8}) {
    const double fd_p = (prof.u_plus(r + h) - prof.u_plus(r - h)) / (2.0 * h);
    CHECK(prof.dudr_plus(r) == doctest::Approx(fd_p).epsilon(1e-5));
    const double fd_m = (prof.u_minus(r + h) - prof.u_minus(r - h)) / (2.0 * h);
    CHECK(prof.dudr_minus(r) == doctest::Approx(fd_m).epsilon(1e-5));
  }
}

TEST_CASE("exit-pressure map endpoints and monotonicity") {
  const auto range = exit_pressure_range(kGeom, kEntrance, kGas);
  CHECK(range.p_min < range.p_max);
  // p_plus(r_ex; r_sh) strictly decreasing in r_sh over 20 samples.
  double prev = 1e300;
  for (int k = 0; k <= 20; ++k) {
    const double r_sh = 1.0 + 2.0 * k / 20.0;
    const RadialProfile prof(kGeom, kEntrance, r_sh, kGas, 129);
    const double pex = prof.p_plus(3.0);
    CHECK(pex < prev);
    prev = pex;
  }
  const RadialProfile at_en(kGeom, kEntrance, 1.0, kGas);
  const RadialProfile at_ex(kGeom, kEntrance, 3.0, kGas);
  CHECK(at_en.p_plus(3.0) == doctest::Approx(range.p_max).epsilon(1e-12));
  CHECK(at_ex.p_plus(3.0) == doctest::Approx(range.p_min).epsilon(1e-12));
}

TEST_CASE("shock position from exit pressure round-trips") {
  for (double r_star : {1.3, 1.7, 2.4}) {
    const RadialProfile prof(kGeom, kEntrance, r_star, kGas);
    const double pc = prof.p_plus(3.0);
    const double rc = shock_from_exit_pressure(kGeom, kEntrance, pc, kGas);
    CHECK(rc == doctest::Approx(r_star).epsilon(1e-9));
    const RadialProfile back(kGeom, kEntrance, rc, kGas);
    CHECK(back.p_plus(3.0) == doctest::Approx(pc).epsilon(1e-9));
  }
  const auto range = exit_pressure_range(kGeom, kEntrance, kGas);
  CHECK_THROWS_AS(
      shock_from_exit_pressure(kGeom, kEntrance, range.p_max * 1.01, kGas),
      PressureOutOfRangeError);
}

TEST_CASE("increasing exit pressure moves the shock toward the entrance") {
  const auto range = exit_pressure_range(kGeom, kEntrance, kGas);
  std::vector<double> rcs;
  for (double t : {0.3, 0.5, 0.7}) {
    const double pc = range.p_min + t * (range.p_max - range.p_min);
    rcs.push_back(shock_from_exit_pressure(kGeom, kEntrance, pc, kGas));
  }
  CHECK(rcs[0] > rcs[1]);
  CHECK(rcs[1] > rcs[2]);
}
