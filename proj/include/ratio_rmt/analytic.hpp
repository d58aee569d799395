#pragma once

// Exact spacing-ratio densities of the coupled 3x3 model: Wigner-type
// surmises, Poisson, the k = 0 closed forms, the beta = 2 closed form built
// from the master integral, the beta = 1 Bessel triple integral, and the
// joint eigenvalue densities both routes start from.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/numerics.hpp"

namespace ratio_rmt {

/// Below k_low the k = 0 closed forms are returned, above k_high the
/// k = 1 surmises.
struct DispatchThresholds {
  double k_low = 0.02;
  double k_high = 0.999;

  void validate() const {
    if (!(0.0 < k_low && k_low < k_high && k_high < 1.0))
      throw DomainError("DispatchThresholds: require 0 < k_low < k_high < 1");
  }
};

namespace detail {
inline void require_ratio(double r, const char* who) {
  if (!(r >= 0.0) || std::isinf(r)) throw DomainError(std::string(who) + ": r must be finite and >= 0");
}
inline void require_open_coupling(double k, const char* who) {
  if (!(k > 0.0 && k < 1.0)) throw DomainError(std::string(who) + ": k must lie in (0, 1)");
}
inline void require_closed_coupling(double k, const char* who) {
  if (!(k >= 0.0 && k <= 1.0)) throw DomainError(std::string(who) + ": k must lie in [0, 1]");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Limits

/// (1/Z)(r + r^2)^beta / (1 + r + r^2)^{1 + 3 beta / 2}, Z_1 = 8/27,
/// Z_2 = 4 pi / (81 sqrt 3).
inline double surmise_ratio_pdf(SymmetryClass cls, double r) {
  detail::require_ratio(r, "surmise_ratio_pdf");
  const double q = 1.0 + r + r * r;
  if (cls == SymmetryClass::Orthogonal) return 27.0 / 8.0 * (r + r * r) / (q * q * std::sqrt(q));
  const double z2 = 4.0 * std::numbers::pi / (81.0 * std::numbers::sqrt3);
  const double num = (r + r * r) * (r + r * r);
  return num / (z2 * q * q * q * q);
}

inline double poisson_ratio_pdf(double r) {
  detail::require_ratio(r, "poisson_ratio_pdf");
  return 1.0 / ((1.0 + r) * (1.0 + r));
}

/// Decoupled (k = 0) density, orthogonal class.
inline double pdf_beta1_k0(double r) {
  detail::require_ratio(r, "pdf_beta1_k0");
  auto p32 = [](double v) { return v * std::sqrt(v); };
  return (1.0 / (2.0 * std::numbers::sqrt2)) *
         ((r + 1.0) / p32(r * r + 1.0) + 1.0 / p32(2.0 * r * (r + 1.0) + 1.0) + r / p32(r * (r + 2.0) + 2.0));
}

/// Decoupled (k = 0) density, unitary class.
inline double pdf_beta2_k0(double r) {
  detail::require_ratio(r, "pdf_beta2_k0");
  auto sq = [](double v) { return v * v; };
  return (r * r / sq(r * (r + 2.0) + 2.0) + (r * (r + 2.0) + 1.0) / sq(r * r + 1.0) +
          1.0 / sq(2.0 * r * (r + 1.0) + 1.0)) /
         std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Master integral and the beta = 2 closed form

struct MasterIntegralParams {
  double alpha2 = 1.0;
  double eta = 0.0;
  double gamma2 = 1.0;
  double u = 0.0;
  double v = 1.0;

  void validate() const {
    if (!(alpha2 > 0.0 && gamma2 > 0.0 && alpha2 * gamma2 - eta * eta > 0.0))
      throw DomainError("master_integral: requires alpha^2 > 0, gamma^2 > 0, alpha^2 gamma^2 - eta^2 > 0");
    if (u == v) throw DomainError("master_integral: requires u != v");
  }
  double a2() const { return alpha2 - eta * eta / gamma2; }
  double b() const { return 0.5 * std::sqrt(gamma2) * (u + 2.0 * eta / gamma2); }
  double c() const { return 0.5 * std::sqrt(gamma2) * (v + 2.0 * eta / gamma2); }
};

namespace detail {
// b(5a^2 + 2b^2)/(a^4 (a^2 + b^2)^2) + 3 asinh(b/a)/(a^2 + b^2)^{5/2}; odd in b.
inline double master_term(double a, double b) {
  const double a2 = a * a;
  const double s = a2 + b * b;
  return b * (5.0 * a2 + 2.0 * b * b) / (a2 * a2 * s * s) + 3.0 * ratio_rmt::asinh(b / a) / (s * s * std::sqrt(s));
}
}  // namespace detail

/// Closed form of the (principal-value) integral over lambda in R, x > 0 of
/// x^5 exp(-alpha^2 x^2 + 2 eta x lambda - gamma^2 lambda^2) /
/// ((u x + 2 lambda)(v x + 2 lambda)).
inline double master_integral(const MasterIntegralParams& p) {
  p.validate();
  const double a = std::sqrt(p.a2());
  return std::sqrt(std::numbers::pi) / (8.0 * (p.v - p.u)) *
         (detail::master_term(a, p.b()) - detail::master_term(a, p.c()));
}

struct Beta2Coefficients {
  std::array<double, 3> a{}, b{}, c{};
};

inline Beta2Coefficients beta2_coefficients(double k, double r) {
  detail::require_open_coupling(k, "beta2_coefficients");
  detail::require_ratio(r, "beta2_coefficients");
  const double k2 = k * k;
  const double s = std::sqrt(2.0 + k2);
  const double d = 2.0 * k * s;
  Beta2Coefficients out;
  out.a = {std::sqrt(2.0 * (1.0 + r * (r + 1.0) * (2.0 - k2))) / s,
           std::sqrt(2.0 * (1.0 + r * (r + k2))) / s,
           std::sqrt(2.0 * (2.0 + r * (r + 2.0) - k2 * (r + 1.0))) / s};
  out.b = {(k2 * (3.0 * r + 1.0) - 2.0 * (r + 1.0)) / d, (2.0 + k2 * (2.0 * r - 1.0)) / d,
           (2.0 - k2 * (2.0 * r + 3.0)) / d};
  out.c = {(k2 * (3.0 * r + 2.0) - 2.0 * r) / d, (k2 * (r - 2.0) - 2.0 * r) / d,
           (2.0 * (r + 1.0) - k2 * (r + 3.0)) / d};
  return out;
}

/// beta = 2 closed form for 0 < k < 1 without threshold dispatch.
inline double pdf_beta2_closed_form(double k, double r) {
  const auto co = beta2_coefficients(k, r);
  double sum = 0.0;
  for (int j = 0; j < 3; ++j)
    sum += detail::master_term(co.a[j], co.b[j]) - detail::master_term(co.a[j], co.c[j]);
  const double k2 = k * k;
  const double om = 1.0 - k2;
  return std::sqrt(2.0 - k2) / (4.0 * std::numbers::pi * k * om * om) * r * (r + 1.0) * sum;
}

/// The three master-integral instances behind the beta = 2 density, with the
/// weights their t_j terms carry.
struct Beta2MasterTerms {
  std::array<MasterIntegralParams, 3> params;
  std::array<double, 3> weight;
};

inline Beta2MasterTerms beta2_master_terms(double k, double r) {
  detail::require_open_coupling(k, "beta2_master_terms");
  detail::require_ratio(r, "beta2_master_terms");
  const double ik2 = 1.0 / (k * k);
  const double g2 = 1.0 + 2.0 * ik2;
  Beta2MasterTerms t;
  t.params[0] = {1.0 - r * r + 2.0 * r * r * ik2, 1.0 + r - 2.0 * r * ik2, g2, r - 1.0, r};
  t.params[1] = {1.0 + r * r, 1.0 - r, g2, -1.0, r};
  t.params[2] = {r * r + 2.0 * ik2 - 1.0, 2.0 * ik2 - r - 1.0, g2, -1.0, r - 1.0};
  t.weight = {1.0, -(r + 1.0), r};
  return t;
}

/// Same density assembled term by term from master_integral.
inline double pdf_beta2_from_master_integrals(double k, double r) {
  const auto terms = beta2_master_terms(k, r);
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) {
    if (terms.weight[j] == 0.0) continue;
    sum += terms.weight[j] * master_integral(terms.params[j]);
  }
  const double k2 = k * k;
  const double om = 1.0 - k2;
  return 2.0 * std::sqrt(2.0 - k2) / (std::pow(std::numbers::pi, 1.5) * k * om * om) * r * (r + 1.0) * sum;
}

inline double pdf_beta2(double k, double r, const DispatchThresholds& th = {}) {
  th.validate();
  detail::require_closed_coupling(k, "pdf_beta2");
  detail::require_ratio(r, "pdf_beta2");
  if (k <= th.k_low) return pdf_beta2_k0(r);
  if (k >= th.k_high) return surmise_ratio_pdf(SymmetryClass::Unitary, r);
  return pdf_beta2_closed_form(k, r);
}

// ---------------------------------------------------------------------------
// beta = 1

namespace detail {

// Breakpoints in phi on [0, pi/4]: the integrand concentrates within ~k of
// phi = 0 and within ~k^2 of phi = pi/4.
inline std::vector<double> phi_breakpoints(double k) {
  const double top = std::numbers::pi / 4.0;
  std::vector<double> pts{0.0};
  for (double m : {0.25, 1.0, 4.0})
    if (m * k < 0.3 * top) pts.push_back(m * k);
  for (double m : {16.0, 4.0, 1.0, 0.25})
    if (m * k * k < 0.3 * top) pts.push_back(top - m * k * k);
  pts.push_back(top);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Coefficients of the lambda-x quadratic form of the beta = 1 exponent at
// fixed phi: E = -A l^2 + B l x - C x^2, Bessel argument z = D l x + F x^2.
struct Beta1Form {
  double A, B, C, D, F;

  Beta1Form(double k, double r, double w) {
    const double c = 1.0 / (k * k) - 1.0;
    A = 1.0 / (k * k) + 0.5;
    B = (c * w + 1.0) * (1.0 - r);
    C = 0.5 * (c * w + 1.0) * (1.0 + r * r);
    D = c * w * (r + 1.0);
    F = 0.5 * D * (r - 1.0);
  }
  // x^2 decay rate of the lambda-marginal of exp(E + s z), s = +-1.
  double decay(double s) const {
    const double b = B + s * D;
    return C - s * F - b * b / (4.0 * A);
  }
};

inline QuadratureSpec inner_spec(const QuadratureSpec& outer, double shrink) {
  QuadratureSpec s = outer;
  s.rel_tol = outer.rel_tol * shrink;
  s.abs_tol = 1e-300;
  return s;
}

}  // namespace detail

/// The Bessel triple integral for 0 < k < 1 (phi outermost, then x, then
/// lambda), Bessel factor folded into the exponent via bessel_i0_scaled.
inline double pdf_beta1_triple(double k, double r, const QuadratureSpec& quad = {}) {
  detail::require_open_coupling(k, "pdf_beta1_triple");
  detail::require_ratio(r, "pdf_beta1_triple");
  quad.validate();
  if (r == 0.0) return 0.0;
  const double pref = std::sqrt(2.0 - k * k) / (std::numbers::pi * k * k * k) * r * (r + 1.0);
  const double T = quad.truncation_sigmas;
  const auto x_spec = detail::inner_spec(quad, 0.1);
  const auto l_spec = detail::inner_spec(quad, 0.01);
  bool inner_ok = true;

  auto phi_integrand = [&](double phi) {
    const detail::Beta1Form f(k, r, std::cos(2.0 * phi));
    const double amin = std::min(f.decay(1.0), f.decay(-1.0));
    if (!(amin > 0.0)) return 0.0;
    const double sigma_l = 1.0 / std::sqrt(2.0 * f.A);
    auto x_integrand = [&](double x) {
      if (x == 0.0) return 0.0;
      auto l_integrand = [&](double l) {
        const double e = -f.A * l * l + f.B * l * x - f.C * x * x;
        const double z = f.D * l * x + f.F * x * x;
        return std::exp(e + std::fabs(z)) * bessel_i0_scaled(z);
      };
      const double c1 = (f.B + f.D) * x / (2.0 * f.A);
      const double c2 = (f.B - f.D) * x / (2.0 * f.A);
      std::array<double, 4> pts{std::min(c1, c2) - T * sigma_l, std::min(c1, c2), std::max(c1, c2),
                                std::max(c1, c2) + T * sigma_l};
      const auto res = adaptive_integrate(l_integrand, std::span<const double>(pts), l_spec);
      inner_ok = inner_ok && res.converged;
      const double x2 = x * x;
      return x2 * x2 * res.value;
    };
    const double xpeak = std::sqrt(2.0 / amin);
    const double xmax = T / std::sqrt(2.0 * amin);
    std::array<double, 3> xpts{0.0, std::min(xpeak, 0.5 * xmax), xmax};
    const auto res = adaptive_integrate(x_integrand, std::span<const double>(xpts), x_spec);
    inner_ok = inner_ok && res.converged;
    return std::cos(phi) * res.value;
  };

  QuadratureSpec outer = quad;
  outer.abs_tol = quad.abs_tol / pref;
  const auto pts = detail::phi_breakpoints(k);
  const auto res = adaptive_integrate(phi_integrand, std::span<const double>(pts), outer);
  if (!res.converged || !inner_ok)
    throw ConvergenceError("pdf_beta1: quadrature did not converge", pref * res.value, pref * res.abs_error);
  return pref * res.value;
}

/// beta = 1 density: triple integral for k in (k_low, k_high), closed-form
/// limits outside.
inline double pdf_beta1(double k, double r, const QuadratureSpec& quad = {}, const DispatchThresholds& th = {}) {
  th.validate();
  detail::require_closed_coupling(k, "pdf_beta1");
  detail::require_ratio(r, "pdf_beta1");
  if (k <= th.k_low) return pdf_beta1_k0(r);
  if (k >= th.k_high) return surmise_ratio_pdf(SymmetryClass::Orthogonal, r);
  return pdf_beta1_triple(k, r, quad);
}

/// Reduced beta = 1 density. Writing I0(z) = (1/pi) int_0^pi e^{z cos t} dt
/// turns the lambda and x integrals into Gaussian moments, leaving
///   p = sqrt(2-k^2)/(pi k^3) r(r+1) 3/(8 sqrt A)
///       int_0^{pi/4} dphi cos(phi) int_0^pi dt a(phi, t)^{-5/2}
/// with a the x^2 decay rate of the lambda-marginal. Smooth integrand, no
/// Bessel evaluations; used wherever many densities are needed.
inline double pdf_beta1_reduced(double k, double r, const QuadratureSpec& quad = {}) {
  detail::require_open_coupling(k, "pdf_beta1_reduced");
  detail::require_ratio(r, "pdf_beta1_reduced");
  quad.validate();
  if (r == 0.0) return 0.0;
  const double A = 1.0 / (k * k) + 0.5;
  const double pref = std::sqrt(2.0 - k * k) / (std::numbers::pi * k * k * k) * r * (r + 1.0) * 3.0 /
                      (8.0 * std::sqrt(A));
  const auto t_spec = detail::inner_spec(quad, 0.1);
  bool inner_ok = true;

  std::vector<double> tpts{0.0};
  for (double m : {0.25, 1.0, 4.0})
    if (m * k < 0.4) tpts.push_back(m * k);
  tpts.push_back(0.5 * std::numbers::pi);
  for (double m : {4.0, 1.0, 0.25})
    if (m * k < 0.4) tpts.push_back(std::numbers::pi - m * k);
  tpts.push_back(std::numbers::pi);

  auto phi_integrand = [&](double phi) {
    const detail::Beta1Form f(k, r, std::cos(2.0 * phi));
    auto t_integrand = [&](double theta) {
      const double t = std::cos(theta);
      const double b = f.B + t * f.D;
      const double a = f.C - t * f.F - b * b / (4.0 * f.A);
      return 1.0 / (a * a * std::sqrt(a));
    };
    const auto res = adaptive_integrate(t_integrand, std::span<const double>(tpts), t_spec);
    inner_ok = inner_ok && res.converged;
    return std::cos(phi) * res.value;
  };
  QuadratureSpec outer = quad;
  outer.abs_tol = quad.abs_tol / pref;
  const auto pts = detail::phi_breakpoints(k);
  const auto res = adaptive_integrate(phi_integrand, std::span<const double>(pts), outer);
  if (!res.converged || !inner_ok)
    throw ConvergenceError("pdf_beta1_reduced: quadrature did not converge", pref * res.value,
                           pref * res.abs_error);
  return pref * res.value;
}

// ---------------------------------------------------------------------------
// Joint eigenvalue densities (unordered)

/// beta = 1 joint density. The u-integral over [1, 2/k^2 - 1] is taken after
/// u = 2/k^2 - 1 - t^2, which removes the inverse square root at the top end.
inline double joint_density_beta1(double k, double l1, double l2, double l3, const QuadratureSpec& quad = {}) {
  detail::require_open_coupling(k, "joint_density_beta1");
  const double k2 = k * k;
  const double pref = std::sqrt(2.0 - k2) / (24.0 * std::numbers::pi * k2 * std::sqrt(1.0 - k2));
  const double vander = std::fabs((l2 - l1) * (l3 - l1) * (l3 - l2));
  if (vander == 0.0) return 0.0;
  const double top = 2.0 / k2 - 1.0;
  const double tmax = std::sqrt(top - 1.0);
  const double s = l1 * l1 + l2 * l2 - 2.0 * l3 * l3;
  const double d = l1 * l1 - l2 * l2;
  const double g3 = (2.0 + k2) / (2.0 * k2) * l3 * l3;
  auto integrand = [&](double t) {
    const double u = top - t * t;
    const double z = 0.25 * (u - 1.0) * d;
    return 2.0 * std::exp(-g3 - 0.25 * (u + 1.0) * s + std::fabs(z)) * bessel_i0_scaled(z);
  };
  std::array<double, 4> pts{0.0, 0.25 * tmax, 0.5 * tmax, tmax};
  const auto res = adaptive_integrate(integrand, std::span<const double>(pts), detail::inner_spec(quad, 0.01));
  if (!res.converged)
    throw ConvergenceError("joint_density_beta1: quadrature did not converge", pref * vander * res.value,
                           pref * vander * res.abs_error);
  return pref * vander * res.value;
}

namespace detail {

// Second divided difference of exp(-g y) at three points.
inline double exp_divided_difference2(double g, std::array<double, 3> y) {
  std::sort(y.begin(), y.end());
  const double d2 = y[1] - y[0];
  const double d3 = y[2] - y[0];
  const double base = std::exp(-g * y[0]);
  if (g * d3 < 1e-4) {
    const double g2 = g * g;
    return base * (0.5 * g2 - g2 * g / 6.0 * (d2 + d3) + g2 * g2 / 24.0 * (d2 * d2 + d3 * d3 + d2 * d3));
  }
  // (e^{-g d} - 1)/d with expm1; -g at d = 0.
  auto first = [g](double d) { return d == 0.0 ? -g : std::expm1(-g * d) / d; };
  const double f01 = first(d2);
  const double f12 = std::exp(-g * d2) * first(d3 - d2);
  return base * (f12 - f01) / d3;
}

}  // namespace detail

/// beta = 2 joint density, evaluated as
///   C (Vandermonde)^2 exp(-sum l^2) f[l1^2, l2^2, l3^2],
/// f(y) = exp(-2(1/k^2 - 1) y), which equals the ratio-of-Vandermondes form
/// but has no removable singularities at l_i = -l_j.
inline double joint_density_beta2(double k, double l1, double l2, double l3) {
  detail::require_open_coupling(k, "joint_density_beta2");
  const double k2 = k * k;
  const double om = 1.0 - k2;
  const double pref = std::sqrt(2.0 - k2) / (3.0 * std::pow(std::numbers::pi, 1.5) * k * om * om);
  const double vander = (l2 - l1) * (l3 - l1) * (l3 - l2);
  const double g = 2.0 * (1.0 / k2 - 1.0);
  const double dd = detail::exp_divided_difference2(g, {l1 * l1, l2 * l2, l3 * l3});
  return pref * vander * vander * std::exp(-(l1 * l1 + l2 * l2 + l3 * l3)) * dd;
}

// ---------------------------------------------------------------------------

/// Which evaluator backs a beta = 1 density request.
enum class Beta1Method { Triple, Reduced };

/// Dispatched ratio density for either class. beta = 1 uses `method` in the
/// interior of the coupling range.
inline double ratio_pdf(SymmetryClass cls, double k, double r, const QuadratureSpec& quad = {},
                        const DispatchThresholds& th = {}, Beta1Method method = Beta1Method::Reduced) {
  if (cls == SymmetryClass::Unitary) return pdf_beta2(k, r, th);
  if (method == Beta1Method::Triple) return pdf_beta1(k, r, quad, th);
  th.validate();
  detail::require_closed_coupling(k, "ratio_pdf");
  detail::require_ratio(r, "ratio_pdf");
  if (k <= th.k_low) return pdf_beta1_k0(r);
  if (k >= th.k_high) return surmise_ratio_pdf(SymmetryClass::Orthogonal, r);
  return pdf_beta1_reduced(k, r, quad);
}

/// Quadrature-measured total mass of a ratio density on [0, inf), computed as
/// int_0^1 p(r) dr + int_0^1 p(1/s)/s^2 ds. Reported, never used to rescale.
template <class Pdf>
double normalization_integral(Pdf&& pdf, const QuadratureSpec& quad = {}) {
  auto upper = [&](double s) { return s == 0.0 ? 0.0 : pdf(1.0 / s) / (s * s); };
  const std::array<double, 4> pts{0.0, 0.1, 0.5, 1.0};
  const auto lo = adaptive_integrate(pdf, std::span<const double>(pts), quad);
  const auto hi = adaptive_integrate(upper, std::span<const double>(pts), quad);
  if (!lo.converged || !hi.converged)
    throw ConvergenceError("normalization_integral: quadrature did not converge", lo.value + hi.value,
                           lo.abs_error + hi.abs_error);
  return lo.value + hi.value;
}

}  // namespace ratio_rmt
