#pragma once

// Named oracle checks grouped into a quick and a full suite.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ratio_rmt/analytic.hpp"
#include "ratio_rmt/density_cache.hpp"
#include "ratio_rmt/fitting.hpp"
#include "ratio_rmt/oracle.hpp"

namespace ratio_rmt {

struct ValidationCheck {
  std::string name;
  double value = 0.0;      ///< measured discrepancy (or statistic)
  double tolerance = 0.0;  ///< pass iff value <= tolerance
  bool passed = false;
  std::string note;
};

enum class Suite { Quick, Full };

namespace detail {

inline ValidationCheck make_check(std::string name, double value, double tol, std::string note = {}) {
  return {std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(note)};
}

inline double goe_surmise_formula(double r) {
  return 27.0 / 8.0 * (r * r + r) / std::pow(r * r + r + 1.0, 2.5);
}

inline double gue_surmise_formula(double r) {
  const double s = r * r + r;
  return 81.0 * std::sqrt(3.0) / (4.0 * std::numbers::pi) * s * s / std::pow(r * r + r + 1.0, 4);
}

/// Closed-form (or reduced-quadrature) value compared against a fixture.
inline double fixture_candidate(const FixtureRecord& f) {
  return f.beta == 2 ? pdf_beta2(f.k, f.r) : pdf_beta1_reduced(f.k, f.r);
}

inline double fixture_tolerance(const FixtureRecord& f) { return f.beta == 2 ? 1e-6 : 2e-4; }

}  // namespace detail

/// Runs the suite. Fixture records are compared against the evaluators (both
/// suites) and re-derived from the joint-density oracle (full suite only).
inline std::vector<ValidationCheck> run_validation(Suite suite, const std::vector<FixtureRecord>& fixtures) {
  std::vector<ValidationCheck> out;
  const std::vector<double> rs{0.1, 0.5, 1.0, 2.0, 5.0};

  double d1 = 0.0, d2 = 0.0;
  for (double r : rs) {
    d1 = std::max(d1, std::fabs(pdf_beta1(0.9995, r) - detail::goe_surmise_formula(r)));
    d2 = std::max(d2, std::fabs(pdf_beta2(0.9995, r) - detail::gue_surmise_formula(r)));
  }
  out.push_back(detail::make_check("surmise_limit_beta1", d1, 1e-12));
  out.push_back(detail::make_check("surmise_limit_beta2", d2, 1e-12));
  out.push_back(detail::make_check("k0_beta1_at_zero", std::fabs(pdf_beta1_k0(0.0) - 1.0 / std::sqrt(2.0)), 1e-12));
  out.push_back(detail::make_check("k0_beta2_at_zero", std::fabs(pdf_beta2_k0(0.0) - 2.0 / std::numbers::pi), 1e-12));

  const QuadratureSpec tight{1e-12, 1e-10, 2000, 8.0};
  auto norm_check = [&](const std::string& name, auto&& pdf, double tol) {
    out.push_back(detail::make_check(name, std::fabs(normalization_integral(pdf, tight) - 1.0), tol));
  };
  norm_check("normalization_surmise_beta1", [](double r) { return surmise_ratio_pdf(SymmetryClass::Orthogonal, r); }, 1e-6);
  norm_check("normalization_surmise_beta2", [](double r) { return surmise_ratio_pdf(SymmetryClass::Unitary, r); }, 1e-6);
  norm_check("normalization_poisson", [](double r) { return poisson_ratio_pdf(r); }, 1e-6);
  norm_check("normalization_k0_beta1", [](double r) { return pdf_beta1_k0(r); }, 1e-6);
  norm_check("normalization_k0_beta2", [](double r) { return pdf_beta2_k0(r); }, 1e-6);
  for (double k : {0.1, 0.3, 0.5, 0.8}) {
    char name[64];
    std::snprintf(name, sizeof name, "normalization_beta2_k%.1f", k);
    norm_check(name, [k](double r) { return pdf_beta2(k, r); }, 1e-6);
  }

  double inv2 = 0.0, inv1 = 0.0;
  for (double k : {0.1, 0.4, 0.9})
    for (double r : {0.2, 0.5, 2.0, 5.0}) {
      inv2 = std::max(inv2, std::fabs(pdf_beta2(k, r) - pdf_beta2(k, 1.0 / r) / (r * r)));
      inv1 = std::max(inv1, std::fabs(pdf_beta1_reduced(k, r) - pdf_beta1_reduced(k, 1.0 / r) / (r * r)));
    }
  out.push_back(detail::make_check("inversion_symmetry_beta2", inv2, 1e-6));
  out.push_back(detail::make_check("inversion_symmetry_beta1", inv1, 5e-4));

  const MasterIntegralParams mp{1.0, 0.0, 4.0, 1.0, 2.0};
  MasterIntegralParams swapped = mp;
  std::swap(swapped.u, swapped.v);
  out.push_back(detail::make_check("master_integral_exchange", std::fabs(master_integral(mp) - master_integral(swapped)), 1e-14));
  out.push_back(detail::make_check("master_integral_vs_pv", std::fabs(master_integral(mp) - master_integral_pv(mp)), 1e-6));

  const std::string want_hash = oracle_spec().hash();
  std::size_t stale = 0;
  double worst2 = 0.0, worst1 = 0.0;
  for (const auto& f : fixtures) {
    if (f.spec_hash != want_hash) ++stale;
    double& worst = f.beta == 2 ? worst2 : worst1;
    worst = std::max(worst, std::fabs(detail::fixture_candidate(f) - f.value) / detail::fixture_tolerance(f));
  }
  out.push_back(detail::make_check("fixtures_present", fixtures.empty() ? 1.0 : 0.0, 0.0,
                                   std::to_string(fixtures.size()) + " records"));
  out.push_back(detail::make_check("fixtures_spec_hash", static_cast<double>(stale), 0.0, "records with foreign spec hash"));
  out.push_back(detail::make_check("fixtures_beta2_closed_form", worst2, 1.0, "max |diff| / 1e-6"));
  out.push_back(detail::make_check("fixtures_beta1_reduced", worst1, 1.0, "max |diff| / 2e-4"));

  if (suite == Suite::Quick) return out;

  double rederive = 0.0;
  for (const auto& f : fixtures) {
    const auto fresh = joint_quadrature_estimate(symmetry_from_beta(f.beta), f.k, f.r);
    const double tol = std::max({10.0 * f.abs_err_bound, 10.0 * fresh.abs_error, 1e-10});
    rederive = std::max(rederive, std::fabs(fresh.value - f.value) / tol);
  }
  out.push_back(detail::make_check("fixtures_rederived", rederive, 1.0, "max |oracle - fixture| / bound"));

  double triple = 0.0;
  for (double k : {0.2, 0.5})
    for (double r : {0.2, 1.0, 3.0}) triple = std::max(triple, std::fabs(pdf_beta1_triple(k, r) - pdf_beta1_reduced(k, r)));
  out.push_back(detail::make_check("beta1_triple_vs_reduced", triple, 2e-4));

  for (int beta : {1, 2})
    for (double k : {0.0, 0.3, 0.7, 1.0}) {
      const auto cls = symmetry_from_beta(beta);
      const DensityCache cache(cls, k);
      const auto sample = sample_ratios(cls, Coupling{k}, 1000000, 20240601 + static_cast<std::uint64_t>(beta));
      char name[64];
      std::snprintf(name, sizeof name, "mc_ks_beta%d_k%.1f", beta, k);
      out.push_back(detail::make_check(name, ks_statistic(sample.ratios, cache), 0.003, "n=1e6"));
    }
  return out;
}

inline bool all_passed(const std::vector<ValidationCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

}  // namespace ratio_rmt
