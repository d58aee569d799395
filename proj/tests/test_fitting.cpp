#include <gtest/gtest.h>

#include <cmath>

#include "ratio_rmt/fitting.hpp"

using namespace ratio_rmt;

namespace {

constexpr auto GOE = SymmetryClass::Orthogonal;
constexpr auto GUE = SymmetryClass::Unitary;

FitOptions quick_options(std::size_t bootstrap = 50) {
  FitOptions o;
  o.bootstrap = bootstrap;
  o.seed = 11;
  return o;
}

}  // namespace

TEST(LogLikelihood, SingleRatioAtSurmise) {
  const std::vector<double> one{1.0};
  const auto ll = log_likelihood(one, GUE, 1.0);
  EXPECT_NEAR(ll.value, std::log(std::sqrt(3.0) / std::numbers::pi), 1e-6);
  EXPECT_NEAR(ll.value, std::log(0.551329), 1e-6);
  EXPECT_EQ(ll.floored, 0u);
}

TEST(LogLikelihood, PrefersGeneratingCoupling) {
  const auto s = sample_ratios(GUE, Coupling{0.5}, 10000, 101);
  EXPECT_GT(log_likelihood(s, GUE, 0.5).value, log_likelihood(s, GUE, 0.9).value);
  const auto t = sample_ratios(GOE, Coupling{0.5}, 10000, 102);
  EXPECT_GT(log_likelihood(t, GOE, 0.5).value, log_likelihood(t, GOE, 0.9).value);
}

TEST(LogLikelihood, FloorsZeroDensity) {
  // r = 0 has zero density for k > 0; the term is floored, not -inf.
  const std::vector<double> v{0.0, 1.0};
  const auto ll = log_likelihood(v, GUE, 0.5);
  EXPECT_EQ(ll.floored, 1u);
  EXPECT_TRUE(std::isfinite(ll.value));
}

TEST(LogLikelihood, RejectsEmptyOrNegative) {
  EXPECT_THROW(log_likelihood(std::vector<double>{}, GUE, 0.5), DomainError);
  EXPECT_THROW(log_likelihood(std::vector<double>{-1.0}, GUE, 0.5), DomainError);
}

TEST(TableLikelihood, MatchesDirectSumsAtNodes) {
  const auto& tab = CouplingTable::shared(GUE, 101);
  auto s = sample_ratios(GUE, Coupling{0.4}, 2000, 5).ratios;
  s.push_back(5e-4);  // outside the cache grid
  s.push_back(2e3);
  const TableLikelihood lik(tab, s);
  const auto sums = lik.node_sums();
  for (std::size_t j : {0u, 10u, 40u, 77u, 100u})
    EXPECT_NEAR(sums[j], log_likelihood(s, tab.cache(j)).value, 1e-9 * std::fabs(sums[j]));
  std::vector<std::uint32_t> w(s.size(), 0);
  w[3] = 2;
  w[s.size() - 1] = 1;
  const auto ws = lik.node_sums(w);
  const std::vector<double> picked{s[3], s[3], s.back()};
  EXPECT_NEAR(ws[40], log_likelihood(picked, tab.cache(40)).value, 1e-12);
}

TEST(KsStatistic, NullAndSeparation) {
  const auto s = sample_ratios(GUE, Coupling{0.6}, 100000, 7);
  EXPECT_LT(ks_statistic(s.ratios, GUE, 0.6), 0.006);
  EXPECT_EQ(ks_statistic(s.ratios, GUE, 0.6), ks_statistic(s.ratios, GUE, 0.6));
  for (auto cls : {GOE, GUE}) {
    const auto z = sample_ratios(cls, Coupling{0.0}, 10000, 8);
    EXPECT_GT(ks_statistic(z.ratios, cls, 1.0), 0.05);
  }
}

TEST(MaximizeOnUnit, UnimodalAndBoundary) {
  std::vector<double> nodes(11);
  auto f = [](double x) { return -(x - 0.37) * (x - 0.37); };
  for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = f(0.1 * j);
  const auto m = maximize_on_unit(f, nodes, 1e-6);
  EXPECT_NEAR(m.x, 0.37, 1e-5);
  EXPECT_FALSE(m.used_fallback);
  auto g = [](double x) { return x; };
  for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = g(0.1 * j);
  EXPECT_NEAR(maximize_on_unit(g, nodes, 1e-6).x, 1.0, 1e-12);
}

TEST(MaximizeOnUnit, FallsBackOnMultimodalObjective) {
  // Narrow peak at 0.9 hidden from golden section, which settles near 0.2.
  auto f = [](double x) { return std::exp(-50 * (x - 0.2) * (x - 0.2)) + 2 * std::exp(-2000 * (x - 0.9) * (x - 0.9)); };
  std::vector<double> nodes(101);
  for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = f(0.01 * j);
  const auto m = maximize_on_unit(f, nodes, 1e-7);
  EXPECT_TRUE(m.used_fallback);
  EXPECT_NEAR(m.x, 0.9, 1e-5);
}

TEST(FitMle, RecoversInteriorCouplingBeta2) {
  const auto s = sample_ratios(GUE, Coupling{0.5}, 50000, 2024);
  const auto f = fit_k_mle(s, GUE, quick_options());
  EXPECT_GE(f.k_hat, 0.47);
  EXPECT_LE(f.k_hat, 0.53);
  EXPECT_LE(f.ci_low, f.k_hat);
  EXPECT_GE(f.ci_high, f.k_hat);
  EXPECT_GE(f.ci_low, 0.0);
  EXPECT_LE(f.ci_high, 1.0);
  EXPECT_GE(f.ks_statistic, 0.0);
  EXPECT_LE(f.ks_statistic, 1.0);
  EXPECT_EQ(f.n_used, 50000u);
  EXPECT_EQ(f.bootstrap_resamples, 50u);
  EXPECT_FALSE(f.small_sample_warning);
}

TEST(FitMle, RecoversInteriorCouplingBeta1) {
  const auto s = sample_ratios(GOE, Coupling{0.3}, 50000, 2025);
  const auto f = fit_k_mle(s, GOE, quick_options());
  EXPECT_NEAR(f.k_hat, 0.3, 0.03);
}

TEST(FitMle, DecoupledLimitBeta1) {
  const auto s = sample_ratios(GOE, Coupling{0.0}, 50000, 2026);
  EXPECT_LE(fit_k_mle(s, GOE, quick_options()).k_hat, 0.05);
}

// The beta = 1 density changes by about 1% between k = 0.5 and k = 1,
// so at this sample size the estimate need not reach the boundary.
TEST(FitMle, FullCouplingLimitBeta1) {
  const auto s = sample_ratios(GOE, Coupling{1.0}, 50000, 2027);
  EXPECT_GE(fit_k_mle(s, GOE, quick_options()).k_hat, 0.95);
}

TEST(FitMle, DeterministicForFixedSeed) {
  const auto s = sample_ratios(GUE, Coupling{0.3}, 5000, 3);
  auto o = quick_options(40);
  o.threads = 1;
  const auto a = fit_k_mle(s, GUE, o);
  o.threads = 3;
  const auto b = fit_k_mle(s, GUE, o);
  EXPECT_EQ(a.k_hat, b.k_hat);
  EXPECT_EQ(a.ci_low, b.ci_low);
  EXPECT_EQ(a.ci_high, b.ci_high);
}

TEST(FitMle, SmallSampleWarning) {
  const auto s = sample_ratios(GUE, Coupling{0.5}, 10, 4);
  EXPECT_TRUE(fit_k_mle(s, GUE, quick_options(20)).small_sample_warning);
}

TEST(FitMle, FlatObjectiveIsNonIdentifiable) {
  const auto s = sample_ratios(GUE, Coupling{0.5}, 50, 4);
  auto o = quick_options(10);
  o.flat_tolerance = 1e9;
  EXPECT_THROW(fit_k_mle(s, GUE, o), NonIdentifiableError);
}

TEST(FitMle, RejectsBadInput) {
  EXPECT_THROW(fit_k_mle(std::vector<double>{}, GUE), DomainError);
  auto o = quick_options();
  o.tol = 0.0;
  EXPECT_THROW(fit_k_mle(std::vector<double>{1.0}, GUE, o), DomainError);
  const auto& tab = CouplingTable::shared(GUE, 101);
  EXPECT_THROW(fit_k_mle(std::vector<double>{1.0}, GOE, o, &tab), DomainError);
}

TEST(FitHistogram, RecoversCoupling) {
  const auto s = sample_ratios(GUE, Coupling{0.5}, 50000, 77);
  const auto f = fit_k_histogram(s.ratios, GUE, quick_options());
  EXPECT_EQ(f.method, FitMethod::HistogramLeastSquares);
  EXPECT_NEAR(f.k_hat, 0.5, 0.06);
  EXPECT_LE(f.ci_low, f.k_hat);
  EXPECT_GE(f.ci_high, f.k_hat);
}

TEST(FitMethod, Names) {
  EXPECT_STREQ(to_string(FitMethod::MLE), "mle");
  EXPECT_STREQ(to_string(FitMethod::HistogramLeastSquares), "histogram-least-squares");
}
