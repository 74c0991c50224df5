#include <cmath>
#include <random>

#include "doctest.h"
#include "nozzle/gas.hpp"

using namespace nozzle;

TEST_CASE("bernoulli invariant on reference states") {
  const GasModel gas{1.4, 1.0};
  // Stagnation with p = (gamma-1)/gamma gives B = c^2/(gamma-1) = 1.
  CHECK(bernoulli({1.0, {0, 0, 0}, 0.4 / 1.4}, gas) == doctest::Approx(1.0).epsilon(1e-14));
  // Direct evaluation.
  CHECK(bernoulli({1.0, {2, 0, 0}, 1.0}, gas) == doctest::Approx(5.5).epsilon(1e-14));
}

TEST_CASE("sonic state sits exactly on the K0 threshold") {
  const GasModel gas{1.4, 3.75};
  const double k0 = gas.k0();
  CHECK(k0 == doctest::Approx(1.25).epsilon(1e-15));
  // rho = 1, |u|^2 = K0, p chosen so that B = B0: then Mach = 1.
  const double u = std::sqrt(k0);
  const double p = k0 / gas.gamma;  // c^2 = K0 with rho = 1
  const PrimState s{1.0, {u, 0, 0}, p};
  CHECK(bernoulli(s, gas) == doctest::Approx(gas.b0).epsilon(1e-14));
  CHECK(mach(s, gas) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mach({1.0, {0, 0, 0}, p}, gas) == doctest::Approx(0.0));
}

TEST_CASE("sound speed at unit state") {
  const GasModel gas{1.4, 1.0};
  CHECK(sound_speed({1.0, {0, 0, 0}, 1.0}, gas) ==
        doctest::Approx(1.1832159566199232).epsilon(1e-15));
}

TEST_CASE("density closure reference values") {
  {
    const GasModel gas{1.4, 3.75};
    // q = 0, eta = (gamma-1) B0 / gamma makes the bracket exactly 1.
    const double eta = 0.4 * gas.b0 / 1.4;
    CHECK(density_closure(eta, {0, 0, 0}, gas) == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    const GasModel gas{1.4, 5.5};
    CHECK(density_closure(1.0, {2, 0, 0}, gas) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("density closure satisfies the Bernoulli identity by construction") {
  const GasModel gas{1.4, 3.75};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ueta(0.2, 2.0), uq(-1.1, 1.1);
  for (int k = 0; k < 200; ++k) {
    const double eta = ueta(rng);
    const Vec3 q{uq(rng), uq(rng), uq(rng)};
    const double rho = density_closure(eta, q, gas);
    const double p = eta * std::pow(rho, gas.gamma);
    CHECK(bernoulli({rho, q, p}, gas) ==
          doctest::Approx(gas.b0).epsilon(1e-12));
  }
}

TEST_CASE("density closure monotone decreasing in speed and entropy") {
  const GasModel gas{1.4, 3.75};
  const double h = 1e-6;
  for (double q : {0.3, 0.9, 1.6}) {
    for (double eta : {0.5, 1.0, 1.7}) {
      const double base = density_closure_q2(eta, q * q, gas);
      CHECK(density_closure_q2(eta, (q + h) * (q + h), gas) < base);
      CHECK(density_closure_q2(eta + h, q * q, gas) < base);
    }
  }
}

TEST_CASE("vacuum guard throws instead of clamping") {
  const GasModel gas{1.4, 1.0};
  CHECK_THROWS_AS(density_closure(1.0, {1.41421357, 0, 0}, gas), VacuumError);
  CHECK_THROWS_AS(flux_A({1.41421357, 0, 0}, {0, 0, 0}, gas), VacuumError);
}

TEST_CASE("flux closure reference values") {
  const GasModel gas{1.4, 1.0};
  const Vec3 zero = flux_A({0, 0, 0}, {0, 0, 0}, gas);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  CHECK(zero[2] == 0.0);
  // (1 - 0.125)^{2.5} * 0.5, high-precision reference.
  const Vec3 v = flux_A({0.5, 0, 0}, {0, 0, 0}, gas);
  CHECK(v[0] == doctest::Approx(0.35808830459359986).epsilon(1e-14));
  CHECK(v[1] == 0.0);
}

TEST_CASE("flux magnitude vanishes like the vacuum-margin power") {
  const GasModel gas{1.4, 1.0};
  // |A| ~ (B0 eps)^{1/(gamma-1)} sqrt(2 B0 (1-eps)) at |s1|^2 = 2 B0 (1-eps).
  double prev = 1e300;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double s = std::sqrt(2.0 * gas.b0 * (1.0 - eps));
    const Vec3 a = flux_A({s, 0, 0}, {0, 0, 0}, gas);
    const double expected = std::pow(gas.b0 * eps, 1.0 / (gas.gamma - 1.0)) * s;
    CHECK(a[0] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(a[0] < prev);
    prev = a[0];
  }
}

TEST_CASE("flux is aligned with its argument") {
  const GasModel gas{1.4, 3.75};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uq(-1.2, 1.2);
  for (int k = 0; k < 100; ++k) {
    const Vec3 s{uq(rng), uq(rng), uq(rng)};
    CHECK(dot(flux_A(s, {0, 0, 0}, gas), s) >= 0.0);
  }
  const Vec3 z = flux_A({0, 0, 0}, {0, 0, 0}, gas);
  CHECK(dot(z, z) == 0.0);
}

TEST_CASE("vorticity source vanishes for irrotational constant-entropy flow") {
  const GasModel gas{1.4, 3.75};
  CHECK(source_G(2.0, 0.4, 1.0, 0.0, 0.0, 0.0, {1.2, 0.1, 0.0}, gas) == 0.0);
  // Background: radial flow, constant entropy, no swirl.
  CHECK(source_G(1.7, 0.3, 0.85, 0.0, 0.0, 0.3, {1.0, 0, 0}, gas) == 0.0);
}

TEST_CASE("vorticity source single-mode reference value") {
  // S = 1.1 (1 + 0.05 cos phi), Lambda = 0.3 sin phi, q = (1.2, 0.1, 0.05)
  // at r = 2, phi = pi/6; reference from a high-precision evaluation of the
  // closed-form source.
  const GasModel gas{1.4, 3.75};
  const double phi = 3.14159265358979323846 / 6.0;
  const double S = 1.1 * (1.0 + 0.05 * std::cos(phi));
  const double dS = -1.1 * 0.05 * std::sin(phi);
  const double lam = 0.3 * std::sin(phi);
  const double dlam = 0.3 * std::cos(phi);
  const double g = source_G(2.0, phi, S, lam, dS, dlam, {1.2, 0.1, 0.05}, gas);
  CHECK(g == doctest::Approx(-0.0053263987294736878).epsilon(1e-13));
}

TEST_CASE("vorticity source is linear in the gradient slots") {
  const GasModel gas{1.4, 3.75};
  const Vec3 q{1.2, 0.1, 0.05};
  const double r = 2.0, phi = 0.5, S = 1.1, lam = 0.2;
  // Linear in dphi_S at fixed rest.
  const double g1 = source_G(r, phi, S, lam, 0.02, 0.0, q, gas);
  const double g2 = source_G(r, phi, S, lam, 0.04, 0.0, q, gas);
  const double g3 = source_G(r, phi, S, lam, 0.08, 0.0, q, gas);
  CHECK(g2 == doctest::Approx(2.0 * g1).epsilon(1e-13));
  CHECK(g3 == doctest::Approx(4.0 * g1).epsilon(1e-13));
  // Linear in Lambda * dphi_Lambda.
  const double h1 = source_G(r, phi, S, lam, 0.0, 0.3, q, gas);
  const double h2 = source_G(r, phi, S, 2.0 * lam, 0.0, 0.3, q, gas);
  const double h3 = source_G(r, phi, S, lam, 0.0, 0.6, q, gas);
  CHECK(h2 == doctest::Approx(2.0 * h1).epsilon(1e-13));
  CHECK(h3 == doctest::Approx(2.0 * h1).epsilon(1e-13));
}

TEST_CASE("stagnation guard on the source") {
  const GasModel gas{1.4, 3.75};
  CHECK_THROWS_AS(source_G(2.0, 0.4, 1.0, 0.0, 0.1, 0.0, {-0.2, 0, 0}, gas),
                  StagnationError);
}
