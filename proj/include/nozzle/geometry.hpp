#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nozzle/errors.hpp"
#include "nozzle/par.hpp"
#include "nozzle/spline.hpp"

namespace nozzle {

using Field = std::vector<double>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Discrete shock front r = f(phi) on [0, phi0]. Clamped cubic spline with
// f'(0) = 0 (smoothness across the axis) and a natural end at the wall,
// where the weighted spaces tolerate reduced regularity.
class ShockFront {
 public:
  ShockFront() = default;
  ShockFront(std::vector<double> phi_nodes, std::vector<double> f_values);
  static ShockFront constant(double r, double phi0, int n_nodes = 33);

  double operator()(double phi) const { return spline_(phi); }
  double slope(double phi) const { return spline_.deriv(phi); }
  double curvature(double phi) const { return spline_.deriv2(phi); }
  double phi0() const { return spline_.x_max(); }
  const std::vector<double>& phi_nodes() const { return spline_.knots(); }
  const std::vector<double>& values() const { return spline_.values(); }
  double min_value() const;
  double max_value() const;

  // Unit normal pointing downstream and unit tangent, spherical components.
  std::array<double, 3> normal(double phi) const;
  std::array<double, 3> tangent(double phi) const;

 private:
  CubicSpline spline_;
};

// Radial affine transformation carrying {r > f(phi)} onto {r > g(phi)} while
// fixing the exit sphere. Inverse = the map with fronts swapped.
class FrontMap {
 public:
  FrontMap(const ShockFront& source, const ShockFront& target, double r_ex)
      : f_(&source), g_(&target), r_ex_(r_ex) {}

  double map_point(double r, double phi) const;
  FrontMap inverse() const { return FrontMap(*g_, *f_, r_ex_); }

  // Cartesian Jacobian [d y_j / d x_i] at theta = 0.
  Mat3 jacobian(double r, double phi) const;

  const ShockFront& source() const { return *f_; }
  const ShockFront& target() const { return *g_; }
  double r_ex() const { return r_ex_; }

 private:
  const ShockFront* f_;
  const ShockFront* g_;
  double r_ex_;
};

// Tensor node grid on the fixed rectangle [r_sh, r_ex] x [0, phi0].
// nr / nphi are cell counts; nodes include all four edges.
struct MappedGrid {
  int nr = 64;
  int nphi = 32;
  double r_sh = 1.5;
  double r_ex = 3.0;
  double phi0 = 0.5235987755982988;

  int nrn() const { return nr + 1; }
  int npn() const { return nphi + 1; }
  std::size_t n_nodes() const { return std::size_t(nrn()) * npn(); }
  double hr() const { return (r_ex - r_sh) / nr; }
  double hphi() const { return phi0 / nphi; }
  double r_tilde(int i) const { return r_sh + hr() * i; }
  double phi(int j) const { return hphi() * j; }
  std::size_t idx(int i, int j) const { return std::size_t(i) * npn() + j; }

  // Physical radius under the front map: r = a(f)(r_tilde, phi).
  double physical_r(const ShockFront& f, double rt, double ph) const {
    return (r_ex - f(ph)) / (r_ex - r_sh) * (rt - r_ex) + r_ex;
  }
  // b = d r_tilde / d r and c = d r_tilde / d phi at fixed physical r.
  double map_b(const ShockFront& f, double ph) const {
    return (r_ex - r_sh) / (r_ex - f(ph));
  }
  double map_c(const ShockFront& f, double rt, double ph) const {
    return (rt - r_ex) / (r_ex - f(ph)) * f.slope(ph);
  }
};

// Nodal partial derivatives on the rectangle: central differences inside,
// second-order one-sided at the edges.
Field d_drt(const Field& u, const MappedGrid& g,
            par::ExecMode mode = par::default_mode());
Field d_dphi(const Field& u, const MappedGrid& g,
             par::ExecMode mode = par::default_mode());

// Local cubic Lagrange interpolant on a uniform column; exact for cubic
// polynomials, which the reflection extension relies on.
class ColumnInterp {
 public:
  ColumnInterp(double x0, double h, const double* values, int n, int stride = 1)
      : x0_(x0), h_(h), v_(values), n_(n), stride_(stride) {}
  double operator()(double x) const;

 private:
  double x0_, h_;
  const double* v_;
  int n_, stride_;
};

// Order-3 reflection across r_tilde = r_sh: value(r_sh - d) is the
// combination sum_i c_i value(r_sh + d/i) with (c1,c2,c3) = (6,-32,27),
// which reproduces polynomials of degree <= 2 exactly.
extern const std::array<double, 3> kExtensionCoeffs;
double extended_eval(const ColumnInterp& column, double r_sh, double rt);

// Ghost values at r_sh - k*h for k = 1..n_ghost from interior samples.
std::vector<double> extend_column(const std::vector<double>& values, double r_sh,
                                  double h, int n_ghost);

// Re-expresses a rectangle field tied to front f_old as a field tied to
// f_new: column splines plus the reflection extension below r_sh.
Field remap_between_fronts(const Field& u, const ShockFront& f_old,
                           const ShockFront& f_new, const MappedGrid& g,
                           par::ExecMode mode = par::default_mode());

// Boundary portion carrying the distance weight of the diagnostic norms.
enum class NormEdge { Wall, WallCorner };

// Discrete weighted Hoelder estimator: sup over nodes of the weighted
// derivatives plus a sampled weighted quotient (5-node stencil pairs plus
// 200 seeded long-range pairs). A diagnostic, not a certified norm.
double weighted_norm(const Field& u, int m, double k, double alpha,
                     const MappedGrid& g, NormEdge edge = NormEdge::Wall,
                     par::ExecMode mode = par::default_mode());

// Same estimator for a one-dimensional field on the front's phi nodes with
// the weight anchored at phi = phi0.
double weighted_norm_1d(const std::vector<double>& phi_nodes,
                        const std::vector<double>& values, int m, double k,
                        double alpha);

void write_front_csv(const std::string& path, const ShockFront& f);

}  // namespace nozzle
