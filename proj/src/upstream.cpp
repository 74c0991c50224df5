#include "nozzle/upstream.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nozzle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

UpstreamField::UpstreamField(const RadialProfile& profile, UpstreamModes modes)
    : profile_(&profile),
      modes_(modes),
      phi0_(profile.geom().phi0),
      r_en_(profile.geom().r_en),
      r_ex_(profile.geom().r_ex) {}

double UpstreamField::gshape(double r) const {
  return std::sin(kPi * (r - r_en_) / (r_ex_ - r_en_));
}
double UpstreamField::dgshape(double r) const {
  const double L = r_ex_ - r_en_;
  return kPi / L * std::cos(kPi * (r - r_en_) / L);
}
double UpstreamField::cmode(double phi) const {
  return std::cos(modes_.k_mode * kPi * phi / phi0_);
}
double UpstreamField::dcmode(double phi) const {
  const double k = modes_.k_mode * kPi / phi0_;
  return -k * std::sin(modes_.k_mode * kPi * phi / phi0_);
}
double UpstreamField::smode(double phi) const {
  return std::sin(modes_.k_mode * kPi * phi / phi0_);
}
double UpstreamField::dsmode(double phi) const {
  const double k = modes_.k_mode * kPi / phi0_;
  return k * std::cos(modes_.k_mode * kPi * phi / phi0_);
}

double UpstreamField::phi_pot(double r, double phi) const {
  return profile_->phi_minus(r) + modes_.a_potential * gshape(r) * cmode(phi);
}
double UpstreamField::dphi_dr(double r, double phi) const {
  return profile_->u_minus(r) + modes_.a_potential * dgshape(r) * cmode(phi);
}
double UpstreamField::dphi_dphi(double r, double phi) const {
  return modes_.a_potential * gshape(r) * dcmode(phi);
}

double UpstreamField::entropy(double r, double phi) const {
  (void)r;
  return profile_->s_minus() * (1.0 + modes_.a_entropy * cmode(phi));
}

double UpstreamField::psi(double r, double phi) const {
  return modes_.a_psi * std::sin(phi) * smode(phi) * gshape(r);
}
double UpstreamField::dpsi_dr(double r, double phi) const {
  return modes_.a_psi * std::sin(phi) * smode(phi) * dgshape(r);
}
double UpstreamField::curl_r(double r, double phi) const {
  // (1/(r sin)) d_phi(sin^2 phi smode g) = g (2 cos smode + sin dsmode)/r.
  const double sp = std::sin(phi), cp = std::cos(phi);
  return modes_.a_psi * gshape(r) * (2.0 * cp * smode(phi) + sp * dsmode(phi)) / r;
}
double UpstreamField::curl_phi(double r, double phi) const {
  // -(1/r) d_r(r psi)
  const double sp = std::sin(phi);
  return -modes_.a_psi * sp * smode(phi) * (gshape(r) + r * dgshape(r)) / r;
}

double UpstreamField::lambda(double r, double phi) const {
  (void)r;
  return modes_.a_swirl * std::sin(phi) * smode(phi);
}
double UpstreamField::lambda_over_rsin(double r, double phi) const {
  return modes_.a_swirl * smode(phi) / r;
}

Vec3 UpstreamField::velocity(double r, double phi) const {
  return {dphi_dr(r, phi) + curl_r(r, phi),
          dphi_dphi(r, phi) / r + curl_phi(r, phi),
          lambda_over_rsin(r, phi)};
}

Vec3 UpstreamField::t_minus(double r, double phi) const {
  return {curl_r(r, phi), curl_phi(r, phi), lambda_over_rsin(r, phi)};
}

PrimState UpstreamField::state(double r, double phi) const {
  const Vec3 u = velocity(r, phi);
  const double S = entropy(r, phi);
  const double rho = density_closure(S, u, gas());
  return {rho, u, S * std::pow(rho, gas().gamma)};
}

double UpstreamField::sigma_estimate(int nr, int nphi) const {
  double dev = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = r_en_ + (r_ex_ - r_en_) * double(i) / double(nr - 1);
    const PrimState bg = profile_->state_minus(r);
    for (int j = 0; j < nphi; ++j) {
      const double ph = phi0_ * double(j) / double(nphi - 1);
      const PrimState s = state(r, ph);
      dev = std::max(dev, std::fabs(s.rho - bg.rho));
      dev = std::max(dev, std::fabs(s.p - bg.p));
      for (int c = 0; c < 3; ++c)
        dev = std::max(dev, std::fabs(s.vel[c] - bg.vel[c]));
    }
  }
  return dev;
}

void UpstreamField::validate_supersonic(double r_lo, double r_hi, int nr,
                                        int nphi) const {
  for (int i = 0; i < nr; ++i) {
    const double r = r_lo + (r_hi - r_lo) * double(i) / double(nr - 1);
    for (int j = 0; j < nphi; ++j) {
      const double ph = phi0_ * double(j) / double(nphi - 1);
      const PrimState s = state(r, ph);
      if (mach(s, gas()) <= 1.0)
        throw NotSupersonicError(
            "upstream field is not supersonic at r = " + std::to_string(r) +
            ", phi = " + std::to_string(ph));
    }
  }
}

}  // namespace nozzle
