#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <span>
#include <stdexcept>
#include <vector>

namespace ratio_rmt {

namespace detail {

inline double hermite(double t, double h, double y0, double y1, double d0, double d1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

inline std::size_t locate(std::span<const double> x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return 0;
  return std::min(i - 1, x.size() - 2);
}

}  // namespace detail

/// Piecewise cubic Hermite interpolant with given node derivatives.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> dydx)
      : x_(std::move(x)), y_(std::move(y)), d_(std::move(dydx)) {
    if (x_.size() < 2 || y_.size() != x_.size() || d_.size() != x_.size())
      throw std::invalid_argument("CubicHermite: need >= 2 nodes with matching values/slopes");
  }

  double operator()(double v) const {
    const std::size_t i = detail::locate(x_, v);
    const double h = x_[i + 1] - x_[i];
    return detail::hermite((v - x_[i]) / h, h, y_[i], y_[i + 1], d_[i], d_[i + 1]);
  }

  std::span<const double> nodes() const { return x_; }
  std::span<const double> values() const { return y_; }

  /// Cell index and local coordinate t in [0, 1] (extrapolates at the ends).
  std::pair<std::size_t, double> cell(double v) const {
    const std::size_t i = detail::locate(x_, v);
    return {i, (v - x_[i]) / (x_[i + 1] - x_[i])};
  }

  /// Power-basis coefficients c0..c3 of cell i in its local coordinate t.
  std::array<double, 4> cell_coefficients(std::size_t i) const {
    const double h = x_[i + 1] - x_[i];
    const double y0 = y_[i], y1 = y_[i + 1], m0 = h * d_[i], m1 = h * d_[i + 1];
    return {y0, m0, -3 * y0 - 2 * m0 + 3 * y1 - m1, 2 * y0 + m0 - 2 * y1 + m1};
  }

 protected:
  std::vector<double> x_, y_, d_;
};

/// Monotone piecewise cubic (Fritsch-Carlson slopes with the weighted
/// harmonic mean of Fritsch-Butland; three-point end slopes).
class Pchip : public CubicHermite {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y)
      : CubicHermite(x, y, slopes(x, y)) {}

 private:
  static std::vector<double> slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("Pchip: need >= 2 nodes");
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      if (!(h[i] > 0.0)) throw std::invalid_argument("Pchip: nodes must be strictly ascending");
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
      d[0] = d[1] = delta[0];
      return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    auto end_slope = [](double h0, double h1, double m0, double m1) {
      double s = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
      if (s * m0 <= 0.0) return 0.0;
      if (m0 * m1 <= 0.0 && std::fabs(s) > std::fabs(3 * m0)) return 3 * m0;
      return s;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
  }
};

/// Cubic Hermite with slopes from the parabola through each node and its
/// neighbours. Third-order accurate for smooth data; not shape-preserving.
class ParabolicHermite : public CubicHermite {
 public:
  ParabolicHermite() = default;
  ParabolicHermite(std::vector<double> x, std::vector<double> y)
      : CubicHermite(x, y, slopes(x, y)) {}

 private:
  static std::vector<double> slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("ParabolicHermite: need >= 3 nodes");
    std::vector<double> d(n);
    auto parabola = [&](std::size_t i0, double at) {
      const double x0 = x[i0], x1 = x[i0 + 1], x2 = x[i0 + 2];
      if (!(x0 < x1 && x1 < x2)) throw std::invalid_argument("ParabolicHermite: nodes must be strictly ascending");
      const double d01 = (y[i0 + 1] - y[i0]) / (x1 - x0);
      const double d12 = (y[i0 + 2] - y[i0 + 1]) / (x2 - x1);
      const double c2 = (d12 - d01) / (x2 - x0);
      return d01 + c2 * ((at - x0) + (at - x1));
    };
    d[0] = parabola(0, x[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = parabola(i - 1, x[i]);
    d[n - 1] = parabola(n - 3, x[n - 1]);
    return d;
  }
};

/// Cubic Hermite with centred-difference slopes on a uniform grid
/// (Catmull-Rom). Linear in the node values, so sums of interpolants equal
/// the interpolant of sums.
class UniformCatmullRom {
 public:
  UniformCatmullRom() = default;
  UniformCatmullRom(double x0, double step, std::vector<double> y)
      : x0_(x0), step_(step), y_(std::move(y)) {
    if (y_.size() < 2 || !(step_ > 0.0))
      throw std::invalid_argument("UniformCatmullRom: need >= 2 nodes and positive step");
  }

  double operator()(double v) const {
    const std::size_t n = y_.size();
    double s = (v - x0_) / step_;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    std::size_t i = std::min(static_cast<std::size_t>(s), n - 2);
    const double t = s - static_cast<double>(i);
    return detail::hermite(t, 1.0, y_[i], y_[i + 1], slope(i), slope(i + 1));
  }

 private:
  double slope(std::size_t i) const {
    const std::size_t n = y_.size();
    if (i == 0) return y_[1] - y_[0];
    if (i == n - 1) return y_[n - 1] - y_[n - 2];
    return 0.5 * (y_[i + 1] - y_[i - 1]);
  }

  double x0_ = 0.0, step_ = 1.0;
  std::vector<double> y_;
};

}  // namespace ratio_rmt
