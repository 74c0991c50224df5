#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace nozzle {

// Natural/clamped cubic spline on strictly increasing abscissas.
// End conditions per side: second-derivative-zero ("natural") or a
// prescribed first derivative ("clamped").
class CubicSpline {
 public:
  struct End {
    bool clamped = false;
    double slope = 0.0;
  };

  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y,
              End left = End{false, 0.0}, End right = End{false, 0.0})
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    assert(n >= 2 && y_.size() == n);
    // Solve the tridiagonal system for the second derivatives m_i.
    std::vector<double> a(n), b(n), c(n), d(n);
    m_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      a[i] = hl / 6.0;
      b[i] = (hl + hr) / 3.0;
      c[i] = hr / 6.0;
      d[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    if (left.clamped) {
      const double h = x_[1] - x_[0];
      b[0] = h / 3.0;
      c[0] = h / 6.0;
      d[0] = (y_[1] - y_[0]) / h - left.slope;
    } else {
      b[0] = 1.0;
      c[0] = 0.0;
      d[0] = 0.0;
    }
    if (right.clamped) {
      const double h = x_[n - 1] - x_[n - 2];
      a[n - 1] = h / 6.0;
      b[n - 1] = h / 3.0;
      d[n - 1] = right.slope - (y_[n - 1] - y_[n - 2]) / h;
    } else {
      a[n - 1] = 0.0;
      b[n - 1] = 1.0;
      d[n - 1] = 0.0;
    }
    // Thomas algorithm.
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

  double operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double s = 1.0 - t;
    return s * y_[i] + t * y_[i + 1] +
           h * h / 6.0 *
               ((s * s * s - s) * m_[i] + (t * t * t - t) * m_[i + 1]);
  }

  double deriv(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double s = 1.0 - t;
    return (y_[i + 1] - y_[i]) / h +
           h / 6.0 * ((3.0 * t * t - 1.0) * m_[i + 1] - (3.0 * s * s - 1.0) * m_[i]);
  }

  double deriv2(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    return (1.0 - t) * m_[i] + t * m_[i + 1];
  }

  // Antiderivative with F(x_0) = 0, exact for the spline.
  double integral(double x) const {
    double acc = 0.0;
    const std::size_t i_end = locate(x);
    for (std::size_t i = 0; i < i_end; ++i) acc += segment_integral(i, x_[i + 1]);
    return acc + segment_integral(i_end, x);
  }

 private:
  std::size_t locate(double x) const {
    // Linear extrapolation outside the knot range uses the end segment.
    std::size_t lo = 0, hi = x_.size() - 1;
    if (x <= x_[0]) return 0;
    if (x >= x_[hi]) return hi - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }

  double segment_integral(std::size_t i, double xb) const {
    const double h = x_[i + 1] - x_[i];
    const double t = (xb - x_[i]) / h;
    const double s = 1.0 - t;
    // Integral of the Hermite form over [x_i, xb].
    const double base = h * (y_[i] * (t - t * t / 2.0) + y_[i + 1] * t * t / 2.0);
    const double corr =
        h * h * h / 6.0 *
        (m_[i] * ((s * s * s * s - 1.0) / -4.0 - (s * s - 1.0) / -2.0) +
         m_[i + 1] * (t * t * t * t / 4.0 - t * t / 2.0));
    return base + corr;
  }

  std::vector<double> x_, y_, m_;
};

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes). Used where
// overshoot is unacceptable, e.g. interpolating transported shock data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    assert(n >= 2 && y_.size() == n);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    s_.assign(n, 0.0);
    s_[0] = d[0];
    s_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      s_[i] = (d[i - 1] * d[i] > 0.0) ? 2.0 / (1.0 / d[i - 1] + 1.0 / d[i]) : 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        s_[i] = s_[i + 1] = 0.0;
        continue;
      }
      const double a = s_[i] / d[i], b = s_[i + 1] / d[i];
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double f = 3.0 / std::sqrt(r);
        s_[i] = f * a * d[i];
        s_[i + 1] = f * b * d[i];
      }
    }
  }

  double operator()(double x) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    if (x <= x_[0]) return y_[0] + s_[0] * (x - x_[0]);
    if (x >= x_[hi]) return y_[hi] + s_[hi] * (x - x_[hi]);
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (x - x_[lo]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y_[lo] + h10 * h * s_[lo] + h01 * y_[lo + 1] + h11 * h * s_[lo + 1];
  }

 private:
  std::vector<double> x_, y_, s_;
};

}  // namespace nozzle
