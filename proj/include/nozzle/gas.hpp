#pragma once

#include <array>
#include <cmath>

#include "nozzle/errors.hpp"

namespace nozzle {

// Spherical velocity components (u_r, u_phi, u_theta).
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double c, const Vec3& v) {
  return {c * v[0], c * v[1], c * v[2]};
}

// Ideal polytropic gas with a globally fixed Bernoulli constant. All
// quantities are nondimensional; the scaling freedom is the caller's.
struct GasModel {
  double gamma = 1.4;  // adiabatic exponent, > 1
  double b0 = 1.0;     // Bernoulli constant, > 0

  // Sonic speed-squared threshold: |u|^2 at Mach 1 when B = b0.
  double k0() const { return 2.0 * (gamma - 1.0) * b0 / (gamma + 1.0); }
};

struct PrimState {
  double rho;  // density > 0
  Vec3 vel;    // (u_r, u_phi, u_theta)
  double p;    // pressure > 0
};

struct AuxState {
  double entropy;  // S = p / rho^gamma
  double ang_mom;  // Lambda = (r sin phi) u_theta
};

// |u|^2/2 + gamma p / ((gamma-1) rho).
double bernoulli(const PrimState& s, const GasModel& gas);

inline double sound_speed(const PrimState& s, const GasModel& gas) {
  return std::sqrt(gas.gamma * s.p / s.rho);
}

inline double mach(const PrimState& s, const GasModel& gas) {
  return std::sqrt(norm2(s.vel)) / sound_speed(s, gas);
}

inline AuxState aux_state(const PrimState& s, double r, double sin_phi,
                          const GasModel& gas) {
  return {s.p / std::pow(s.rho, gas.gamma), r * sin_phi * s.vel[2]};
}

// Density closure rho = [ (gamma-1)/(gamma eta) (B0 - |q|^2/2) ]^{1/(gamma-1)}.
// Throws VacuumError when |q|^2 >= 2 B0 (1 - 1e-10).
double density_closure(double entropy, const Vec3& q, const GasModel& gas);
double density_closure_q2(double entropy, double q2, const GasModel& gas);

// Momentum-flux closure A(s1, s2) = (B0 - |s1+s2|^2/2)^{1/(gamma-1)} (s1+s2).
// The constant-entropy normalization is absorbed: the entropy dependence is
// carried only through the vorticity source and the pressure recovery.
Vec3 flux_A(const Vec3& s1, const Vec3& s2, const GasModel& gas);

// Scalar prefactor of flux_A at speed-squared q2.
double flux_a_coeff(double q2, const GasModel& gas);

// Vorticity source of the stream-function equation:
//   G = 1/(r q_r) [ dphi_S rho^{gamma-1}(S, q) / (gamma-1)
//                   + Lambda dphi_Lambda / (r^2 sin^2 phi) ].
// Throws StagnationError when q . e_r <= 0.
double source_G(double r, double phi, double S, double Lambda, double dphi_S,
                double dphi_Lambda, const Vec3& q, const GasModel& gas);

}  // namespace nozzle
