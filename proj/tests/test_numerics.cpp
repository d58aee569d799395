#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ratio_rmt/numerics.hpp"
#include "ratio_rmt/random.hpp"

using namespace ratio_rmt;

namespace {

// Direct power series for e^{-|z|} I0(z); slow but independent of the library.
double i0_scaled_series(double z) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = static_cast<long double>(z) * z / 4.0L;
  for (int m = 1; m < 400; ++m) {
    term *= q / (static_cast<long double>(m) * m);
    sum += term;
    if (term < sum * 1e-21L) break;
  }
  return static_cast<double>(sum * std::exp(-std::fabs(static_cast<long double>(z))));
}

}  // namespace

TEST(BesselI0Scaled, KnownValues) {
  EXPECT_DOUBLE_EQ(bessel_i0_scaled(0.0), 1.0);
  EXPECT_NEAR(bessel_i0_scaled(1.0), 0.4657596075936404, 1e-15);
  // Two-term asymptotic estimate; the next term is 9/(2 (800)^2) relative.
  EXPECT_NEAR(bessel_i0_scaled(100.0), 1.0 / std::sqrt(2.0 * std::numbers::pi * 100.0) * (1.0 + 1.0 / 800.0), 5e-7);
  EXPECT_NEAR(bessel_i0_scaled(100.0), 0.03994437929909668, 1e-15);
}

TEST(BesselI0Scaled, MatchesSeriesOnSmallArguments) {
  for (double z = 0.0; z <= 10.0; z += 0.25)
    EXPECT_NEAR(bessel_i0_scaled(z), i0_scaled_series(z), 1e-12 * i0_scaled_series(z)) << "z=" << z;
}

TEST(BesselI0Scaled, EvenAndPositive) {
  for (double z : {0.3, 2.0, 7.75, 24.9, 25.1, 80.0, 1e4}) {
    EXPECT_EQ(bessel_i0_scaled(z), bessel_i0_scaled(-z));
    EXPECT_GT(bessel_i0_scaled(z), 0.0);
  }
}

TEST(BesselI0Scaled, ContinuousAcrossBranchSwitch) {
  // Reference values from 30-digit arithmetic.
  EXPECT_NEAR(bessel_i0_scaled(24.999), 0.0801983942568044719, 1e-15);
  EXPECT_NEAR(bessel_i0_scaled(25.001), 0.0801951529363448685, 1e-15);
}

TEST(Asinh, Values) {
  EXPECT_EQ(ratio_rmt::asinh(0.0), 0.0);
  EXPECT_NEAR(ratio_rmt::asinh(1.0), 0.881373587019543, 1e-15);
  EXPECT_DOUBLE_EQ(ratio_rmt::asinh(-3.7), -ratio_rmt::asinh(3.7));
  EXPECT_NEAR(ratio_rmt::asinh(1e-10), 1e-10, 1e-26);
  EXPECT_NEAR(ratio_rmt::asinh(1e10), std::log(2e10), 1e-12);
}

TEST(Integrate1d, Examples) {
  EXPECT_NEAR(integrate_1d([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(integrate_1d([](double p) { return std::cos(p); }, 0.0, std::numbers::pi / 4), std::sqrt(0.5), 1e-14);
}

TEST(Integrate1d, RejectsEmptyInterval) {
  EXPECT_THROW(integrate_1d([](double x) { return x; }, 1.0, 1.0), DomainError);
}

TEST(Integrate1d, ReportsExhaustedBudget) {
  QuadratureSpec q;
  q.abs_tol = 1e-15;
  q.rel_tol = 1e-15;
  q.max_subdivisions = 3;
  EXPECT_THROW(integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q), ConvergenceError);
}

TEST(IntegrateSemiInfinite, GaussianMoments) {
  const double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(integrate_semiinfinite([](double x) { return std::exp(-x * x); }, {0.0, std::sqrt(0.5)}), sp / 2, 1e-9);
  EXPECT_NEAR(integrate_semiinfinite([](double x) { return std::pow(x, 4) * std::exp(-x * x); }, {0.0, std::sqrt(0.5)}),
              3.0 * sp / 8.0, 1e-9);
}

TEST(IntegrateRealLine, TranslationInvariant) {
  const double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(integrate_real_line([](double l) { return std::exp(-l * l); }, {0.0, std::sqrt(0.5)}), sp, 1e-9);
  EXPECT_NEAR(integrate_real_line([](double l) { return std::exp(-(l - 5) * (l - 5)); }, {5.0, std::sqrt(0.5)}), sp, 1e-9);
}

TEST(QuadratureSpec, ValidationAndHash) {
  QuadratureSpec bad;
  bad.abs_tol = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  QuadratureSpec a, b;
  EXPECT_EQ(a.hash(), b.hash());
  b.rel_tol *= 2;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x, w;
  gauss_legendre(10, x, w);
  double s0 = 0, s18 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s18 += w[i] * std::pow(x[i], 18);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s18, 2.0 / 19.0, 1e-14);
}

TEST(Substream, DeterministicAndDistinct) {
  Substream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Substream, NormalMoments) {
  Substream g(7, 0);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}
