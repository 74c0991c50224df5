#include "nozzle/gas.hpp"

#include <string>

namespace nozzle {

namespace {
constexpr double kVacuumGuard = 1e-10;
}

double bernoulli(const PrimState& s, const GasModel& gas) {
  return 0.5 * norm2(s.vel) + gas.gamma * s.p / ((gas.gamma - 1.0) * s.rho);
}

double density_closure_q2(double entropy, double q2, const GasModel& gas) {
  if (q2 >= 2.0 * gas.b0 * (1.0 - kVacuumGuard))
    throw VacuumError("density closure: |q|^2 = " + std::to_string(q2) +
                      " reaches the vacuum threshold 2*B0 = " +
                      std::to_string(2.0 * gas.b0));
  const double bracket =
      (gas.gamma - 1.0) / (gas.gamma * entropy) * (gas.b0 - 0.5 * q2);
  return std::pow(bracket, 1.0 / (gas.gamma - 1.0));
}

double density_closure(double entropy, const Vec3& q, const GasModel& gas) {
  return density_closure_q2(entropy, norm2(q), gas);
}

double flux_a_coeff(double q2, const GasModel& gas) {
  if (q2 >= 2.0 * gas.b0 * (1.0 - kVacuumGuard))
    throw VacuumError("flux coefficient: |s1+s2|^2 = " + std::to_string(q2) +
                      " reaches the vacuum threshold 2*B0 = " +
                      std::to_string(2.0 * gas.b0));
  return std::pow(gas.b0 - 0.5 * q2, 1.0 / (gas.gamma - 1.0));
}

Vec3 flux_A(const Vec3& s1, const Vec3& s2, const GasModel& gas) {
  const Vec3 q = s1 + s2;
  return flux_a_coeff(norm2(q), gas) * q;
}

double source_G(double r, double phi, double S, double Lambda, double dphi_S,
                double dphi_Lambda, const Vec3& q, const GasModel& gas) {
  const double qr = q[0];
  if (qr <= 0.0)
    throw StagnationError("source_G: q.e_r = " + std::to_string(qr) +
                          " <= 0 at r = " + std::to_string(r));
  const double rho = density_closure(S, q, gas);
  const double sp = std::sin(phi);
  return 1.0 / (r * qr) *
         (dphi_S * std::pow(rho, gas.gamma - 1.0) / (gas.gamma - 1.0) +
          Lambda * dphi_Lambda / (r * r * sp * sp));
}

}  // namespace nozzle
