#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nozzle/gas.hpp"
#include "nozzle/spline.hpp"

namespace nozzle {

// Spherical-sector nozzle r_en < r < r_ex, 0 <= phi < phi0.
struct NozzleGeom {
  double r_en = 1.0;
  double r_ex = 3.0;
  double phi0 = 0.5235987755982988;  // pi/6

  void validate() const;
};

// Supersonic inflow data prescribed on the entrance sphere.
struct EntranceData {
  double rho_en = 1.0;
  double u_en = 2.0;
  double p_en = 0.5;

  void validate(const GasModel& gas) const;
};

enum class Branch { Supersonic, Subsonic };

// Solves m = r^2 * rho(S, u) * u for u on the requested side of the sonic
// speed u* = sqrt(K0). Bracketed Brent iteration, 1e-13 relative tolerance.
// Throws ChokedError when the peak mass flux at r is below m.
double radial_state(double r, double m, double entropy, Branch branch,
                    const GasModel& gas);

// Rankine-Hugoniot jump of a supersonic radial state:
//   u+ = K0/u-,  p+ = rho- u-^2 + p- - rho- K0,  rho+ = rho- u-/u+.
PrimState rh_jump(const PrimState& minus, const GasModel& gas);

// Radial transonic background with a shock at r = r_sh. The supersonic
// branch is tabulated on [r_en, r_ex]; the subsonic branch extends below
// r_sh as far as the choking radius allows (at most extend_below), since
// the free-boundary solver evaluates background fields on a band around
// the shock.
class RadialProfile {
 public:
  RadialProfile(const NozzleGeom& geom, const EntranceData& entrance,
                double r_sh, const GasModel& gas, int nodes_per_branch = 257,
                double extend_below = 0.35);

  const GasModel& gas() const { return gas_; }
  const NozzleGeom& geom() const { return geom_; }
  double r_sh() const { return r_sh_; }
  double mass_flux() const { return m_; }
  double s_minus() const { return s_minus_; }
  double s_plus() const { return s_plus_; }
  double r_plus_min() const { return r_plus_min_; }
  const std::vector<double>& knots_minus() const { return u_m_.knots(); }
  const std::vector<double>& knots_plus() const { return u_p_.knots(); }

  // Branch fields. u is the radial velocity d(phi)/dr; the potentials are
  // normalized so that phi_minus(r_sh) = phi_plus(r_sh) = 0.
  double u_minus(double r) const { return u_m_(r); }
  double u_plus(double r) const { return u_p_(r); }
  double dudr_minus(double r) const { return dudr(u_m_(r), r); }
  double dudr_plus(double r) const { return dudr(u_p_(r), r); }
  double rho_minus(double r) const;
  double rho_plus(double r) const;
  double p_minus(double r) const;
  double p_plus(double r) const;
  double phi_minus(double r) const { return phi_m_(r); }
  double phi_plus(double r) const { return phi_p_(r); }
  double mach_minus(double r) const;
  double mach_plus(double r) const;

  PrimState state_minus(double r) const;
  PrimState state_plus(double r) const;

  // d/dr of (K0 / u_minus - u_plus); used by the shock-update coefficient.
  double d_prandtl_gap_dr(double r) const;

  // Physical background: minus branch for r < r_sh, plus branch beyond.
  void write_csv(const std::string& path, int samples = 401) const;

 private:
  double dudr(double u, double r) const;

  GasModel gas_;
  NozzleGeom geom_;
  double r_sh_, m_, s_minus_, s_plus_, r_plus_min_;
  CubicSpline u_m_, u_p_, phi_m_, phi_p_;
};

RadialProfile profile_for_shock(const NozzleGeom& geom,
                                const EntranceData& entrance, double r_sh,
                                const GasModel& gas);

struct ExitPressureRange {
  double p_min;  // shock at the exit
  double p_max;  // shock at the entrance
};

ExitPressureRange exit_pressure_range(const NozzleGeom& geom,
                                      const EntranceData& entrance,
                                      const GasModel& gas);

// Inverts r_sh -> p_plus(r_ex; r_sh) (strictly monotone) by bisection to
// |dr| < 1e-10. Throws PressureOutOfRangeError outside (p_min, p_max).
double shock_from_exit_pressure(const NozzleGeom& geom,
                                const EntranceData& entrance, double p_c,
                                const GasModel& gas);

// Brent root finder on a bracketing interval [a, b] with f(a) f(b) <= 0.
double brent(const std::function<double(double)>& f, double a, double b,
             double rel_tol, int max_iter = 200);

}  // namespace nozzle
