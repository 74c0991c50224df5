#pragma once

#include "nozzle/background.hpp"
#include "nozzle/gas.hpp"

namespace nozzle {

// Smooth axisymmetric perturbation modes of the supersonic inflow. The
// perturbed flow shares the Bernoulli constant exactly: density and
// pressure are recovered through the closure rather than perturbed
// directly. All angular shapes have vanishing phi-derivative on the axis
// and satisfy the wall slip hypothesis; the swirl vanishes on the axis.
struct UpstreamModes {
  double a_potential = 0.0;  // potential mode amplitude
  double a_entropy = 0.0;    // relative entropy mode amplitude
  double a_swirl = 0.0;      // angular-momentum mode amplitude
  double a_psi = 0.0;        // upstream stream-function amplitude
  int k_mode = 1;            // angular wavenumber multiplier

  bool zero() const {
    return a_potential == 0.0 && a_entropy == 0.0 && a_swirl == 0.0 &&
           a_psi == 0.0;
  }
  UpstreamModes scaled(double s) const {
    return {a_potential * s, a_entropy * s, a_swirl * s, a_psi * s, k_mode};
  }
};

// Analytic upstream data (rho^-, u^-, p^-) = background + modes, with all
// the traces the downstream solver consumes. Derivatives are closed-form.
class UpstreamField {
 public:
  UpstreamField(const RadialProfile& profile, UpstreamModes modes);

  const RadialProfile& profile() const { return *profile_; }
  const GasModel& gas() const { return profile_->gas(); }
  bool is_background() const { return modes_.zero(); }

  double phi_pot(double r, double phi) const;
  double dphi_dr(double r, double phi) const;
  double dphi_dphi(double r, double phi) const;  // partial w.r.t. phi
  double chi_minus(double r, double phi) const { return phi_pot(r, phi) - profile_->phi_minus(r); }

  double entropy(double r, double phi) const;
  double psi(double r, double phi) const;
  double dpsi_dr(double r, double phi) const;
  // (1/(r sin phi)) d_phi(sin phi psi), finite on the axis.
  double curl_r(double r, double phi) const;
  // -(1/r) d_r(r psi)
  double curl_phi(double r, double phi) const;
  double lambda(double r, double phi) const;
  double lambda_over_rsin(double r, double phi) const;

  // u^- = grad phi^- + curl(psi^- e_theta) + (Lambda^-/(r sin phi)) e_theta.
  Vec3 velocity(double r, double phi) const;
  Vec3 t_minus(double r, double phi) const;
  PrimState state(double r, double phi) const;

  // Sampled sup deviation from the background (the sigma measure of the
  // upstream part; the exit part is added by the driver).
  double sigma_estimate(int nr = 33, int nphi = 17) const;

  // Throws NotSupersonicError if any sampled point in the band
  // [r_lo, r_hi] fails Mach > 1.
  void validate_supersonic(double r_lo, double r_hi, int nr = 33,
                           int nphi = 17) const;

 private:
  const RadialProfile* profile_;
  UpstreamModes modes_;
  double phi0_, r_en_, r_ex_;

  double gshape(double r) const;    // radial envelope, zero at the entrance
  double dgshape(double r) const;
  double cmode(double phi) const;   // cos(k pi phi / phi0)
  double dcmode(double phi) const;
  double smode(double phi) const;   // sin(k pi phi / phi0)
  double dsmode(double phi) const;
};

}  // namespace nozzle
