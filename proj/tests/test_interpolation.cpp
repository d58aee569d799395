#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ratio_rmt/interpolation.hpp"

using namespace ratio_rmt;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

}  // namespace

TEST(CubicHermite, ReproducesCubicWithExactSlopes) {
  auto f = [](double x) { return 2 * x * x * x - x + 1; };
  auto df = [](double x) { return 6 * x * x - 1; };
  const auto x = linspace(-1, 2, 7);
  std::vector<double> y, d;
  for (double v : x) {
    y.push_back(f(v));
    d.push_back(df(v));
  }
  const CubicHermite h(x, y, d);
  for (double v = -1.0; v <= 2.0; v += 0.037) EXPECT_NEAR(h(v), f(v), 1e-12);
}

TEST(CubicHermite, CellCoefficientsMatchEvaluation) {
  const CubicHermite h({0.0, 1.0, 3.0}, {1.0, 2.0, 0.5}, {0.0, -1.0, 2.0});
  for (double v : {0.2, 0.9, 1.5, 2.7}) {
    const auto [i, t] = h.cell(v);
    const auto c = h.cell_coefficients(i);
    EXPECT_NEAR(c[0] + t * (c[1] + t * (c[2] + t * c[3])), h(v), 1e-14);
  }
}

TEST(CubicHermite, RejectsMismatchedInput) {
  EXPECT_THROW(CubicHermite({0.0}, {1.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(CubicHermite({0.0, 1.0}, {1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST(Pchip, MonotoneDataStaysMonotone) {
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{0, 0.1, 0.1, 0.9, 1.0, 1.0};
  const Pchip p(x, y);
  double prev = p(0.0);
  for (double v = 0.01; v <= 5.0; v += 0.01) {
    const double cur = p(v);
    EXPECT_GE(cur, prev - 1e-15);
    prev = cur;
  }
}

TEST(ParabolicHermite, ExactForQuadratics) {
  auto f = [](double x) { return 0.5 * x * x - 2 * x + 3; };
  const auto x = linspace(0, 4, 9);
  std::vector<double> y;
  for (double v : x) y.push_back(f(v));
  const ParabolicHermite p(x, y);
  for (double v = 0.0; v <= 4.0; v += 0.013) EXPECT_NEAR(p(v), f(v), 1e-12);
}

TEST(ParabolicHermite, ResolvesSmoothMaximumBetterThanPchip) {
  // Pchip clips slopes next to an extremum; the parabolic slopes do not.
  const auto x = linspace(-2, 2, 41);
  std::vector<double> y;
  for (double v : x) y.push_back(std::exp(-(v - 0.03) * (v - 0.03)));
  const ParabolicHermite p(x, y);
  const Pchip q(x, y);
  EXPECT_NEAR(p(0.03), 1.0, 2e-5);
  EXPECT_LT(std::fabs(p(0.03) - 1.0), 0.5 * std::fabs(q(0.03) - 1.0));
}

TEST(UniformCatmullRom, InterpolatesNodesAndIsLinear) {
  const std::vector<double> a{0, 1, 4, 9, 16}, b{1, 1, 0, 2, 5};
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
  const UniformCatmullRom fa(0.0, 0.25, a), fb(0.0, 0.25, b), fs(0.0, 0.25, s);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(fa(0.25 * i), a[i], 1e-15);
  for (double v = 0.0; v <= 1.0; v += 0.01) EXPECT_NEAR(fs(v), fa(v) + fb(v), 1e-12);
}

TEST(UniformCatmullRom, ClampsOutsideRange) {
  const UniformCatmullRom f(0.0, 0.5, {1.0, 2.0, 5.0});
  EXPECT_DOUBLE_EQ(f(-3.0), 1.0);
  EXPECT_DOUBLE_EQ(f(7.0), 5.0);
}
