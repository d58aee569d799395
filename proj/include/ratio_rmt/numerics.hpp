#pragma once

// Special functions and adaptive quadrature shared by the analytic
// evaluators and the oracles.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ratio_rmt {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an adaptive rule runs out of subdivisions. Carries the best
/// estimate so callers can still report it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

struct QuadratureSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
  int max_subdivisions = 500;
  double truncation_sigmas = 8.0;

  void validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be > 0");
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    if (!(truncation_sigmas >= 4.0))
      throw DomainError("QuadratureSpec: truncation_sigmas must be >= 4");
  }

  std::string to_string() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "abs_tol=%.17g;rel_tol=%.17g;max_subdivisions=%d;truncation_sigmas=%.17g",
                  abs_tol, rel_tol, max_subdivisions, truncation_sigmas);
    return buf;
  }

  /// 64-bit FNV-1a of to_string(), hex encoded. Identifies the rule that
  /// produced a pinned value.
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_string()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

// ---------------------------------------------------------------------------
// Special functions

/// e^{-|z|} I0(z). Power series below |z| = 25 (every term positive, so no
/// cancellation), Hankel asymptotic series above.
inline double bessel_i0_scaled(double z) {
  if (!std::isfinite(z)) throw DomainError("bessel_i0_scaled: non-finite argument");
  const double az = std::fabs(z);
  if (az < 25.0) {
    const double q = 0.25 * az * az;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k));
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return sum * std::exp(-az);
  }
  // sum_k ((2k-1)!!)^2 / (k! 8^k z^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * az);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * az);
}

/// ln(x + sqrt(1 + x^2)) evaluated without cancellation for either sign.
inline double asinh(double x) {
  if (!std::isfinite(x)) throw DomainError("asinh: non-finite argument");
  const double ax = std::fabs(x);
  double r;
  if (ax > 1e8) {
    r = std::log(2.0 * ax) + 0.25 / (ax * ax);
  } else {
    r = std::log1p(ax + ax * ax / (1.0 + std::sqrt(1.0 + ax * ax)));
  }
  return x < 0.0 ? -r : r;
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod 15-point abscissae/weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  const double result = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, result, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 over [points.front(), points.back()],
/// with the interior points as initial breakpoints. Never throws on
/// non-convergence; check `converged`.
template <class F>
  requires std::invocable<F&, double>
QuadResult adaptive_integrate(F&& f, std::span<const double> points, const QuadratureSpec& spec) {
  std::priority_queue<detail::Segment> heap;
  QuadResult out;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1])) continue;
    auto s = detail::gauss_kronrod_15(f, points[i], points[i + 1]);
    out.evaluations += 15;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  std::vector<detail::Segment> frozen;
  int subdivisions = static_cast<int>(heap.size());
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };
  while (!heap.empty() && total_err > tolerance()) {
    if (subdivisions >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    auto s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(s.a < mid && mid < s.b) || (s.b - s.a) < 1e-13 * std::max(std::fabs(s.a), std::fabs(s.b))) {
      frozen.push_back(s);
      continue;
    }
    auto left = detail::gauss_kronrod_15(f, s.a, mid);
    auto right = detail::gauss_kronrod_15(f, mid, s.b);
    out.evaluations += 30;
    ++subdivisions;
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
  }
  if (heap.empty() && total_err > tolerance()) out.converged = false;
  // Re-sum from the segments to drop accumulated rounding in the running total.
  double sum = 0.0, err = 0.0;
  for (const auto& s : frozen) {
    sum += s.value;
    err += s.error;
  }
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.abs_error = err;
  return out;
}

template <class F>
  requires std::invocable<F&, double>
QuadResult adaptive_integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  const std::array<double, 2> pts{a, b};
  return adaptive_integrate(f, std::span<const double>(pts), spec);
}

namespace detail {
inline double checked(const QuadResult& r, const char* who) {
  if (!r.converged)
    throw ConvergenceError(std::string(who) + ": subdivision budget exhausted", r.value, r.abs_error);
  return r.value;
}
}  // namespace detail

/// Adaptive estimate of the integral of f over [a, b]; throws ConvergenceError
/// when the subdivision budget runs out.
template <class F>
  requires std::invocable<F&, double>
double integrate_1d(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate_1d: requires a < b");
  return detail::checked(adaptive_integrate(f, a, b, spec), "integrate_1d");
}

/// Where a Gaussian-tailed integrand lives: peak near `center`, tails decaying
/// at least like exp(-(t - center)^2 / (2 scale^2)).
struct ScaleHint {
  double center = 0.0;
  double scale = 1.0;
};

/// Integral over [0, inf), truncated at center + truncation_sigmas * scale.
template <class F>
  requires std::invocable<F&, double>
double integrate_semiinfinite(F&& f, ScaleHint hint, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(hint.scale > 0.0)) throw DomainError("integrate_semiinfinite: scale must be > 0");
  const double upper = std::max(hint.center, 0.0) + spec.truncation_sigmas * hint.scale;
  std::vector<double> pts{0.0};
  if (hint.center > 0.0 && hint.center < upper) pts.push_back(hint.center);
  pts.push_back(upper);
  return detail::checked(adaptive_integrate(f, std::span<const double>(pts), spec),
                         "integrate_semiinfinite");
}

/// Integral over the real line, truncated to center +/- truncation_sigmas * scale.
template <class F>
  requires std::invocable<F&, double>
double integrate_real_line(F&& f, ScaleHint hint, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(hint.scale > 0.0)) throw DomainError("integrate_real_line: scale must be > 0");
  const double w = spec.truncation_sigmas * hint.scale;
  const std::array<double, 3> pts{hint.center - w, hint.center, hint.center + w};
  return detail::checked(adaptive_integrate(f, std::span<const double>(pts), spec),
                         "integrate_real_line");
}

/// Fixed n-point Gauss-Legendre nodes/weights on [-1, 1] (Newton on P_n).
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace ratio_rmt
