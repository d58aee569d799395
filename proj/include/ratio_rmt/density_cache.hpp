#pragma once

// Tabulated ratio densities. A DensityCache holds one (class, k) density on a
// log-spaced r-grid with cubic Hermite interpolation of ln p against ln r,
// plus optionally its CDF. A CouplingTable stacks caches over a uniform
// k-grid for likelihood work.

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "ratio_rmt/analytic.hpp"
#include "ratio_rmt/interpolation.hpp"

namespace ratio_rmt {

struct CacheOptions {
  QuadratureSpec quad{};
  DispatchThresholds thresholds{};
  std::size_t points = 400;
  double r_min = 1e-3;
  double r_max = 1e3;
  bool with_cdf = true;
};

class DensityCache {
 public:
  DensityCache(SymmetryClass cls, double k, const CacheOptions& opts = {})
      : cls_(cls), k_(Coupling::for_analytic(k).k), opts_(opts) {
    opts_.quad.validate();
    opts_.thresholds.validate();
    if (opts_.points < 4 || !(opts_.r_min > 0.0 && opts_.r_min < opts_.r_max))
      throw DomainError("DensityCache: need >= 4 points and 0 < r_min < r_max");
    build();
  }

  SymmetryClass symmetry() const { return cls_; }
  double k() const { return k_; }
  const CacheOptions& options() const { return opts_; }
  double r_min() const { return opts_.r_min; }
  double r_max() const { return opts_.r_max; }
  bool has_cdf() const { return opts_.with_cdf; }

  /// Direct (uncached) evaluation.
  double direct(double r) const { return ratio_pdf(cls_, k_, r, opts_.quad, opts_.thresholds); }

  double pdf(double r) const {
    if (r >= opts_.r_min && r <= opts_.r_max) return std::exp(log_pdf_(std::log(r)));
    return direct(r);
  }

  /// ln p; inside the grid this is the interpolant itself.
  double log_pdf(double r) const {
    if (r >= opts_.r_min && r <= opts_.r_max) return log_pdf_(std::log(r));
    return std::log(direct(r));
  }

  double cdf(double r) const {
    if (!opts_.with_cdf) throw DomainError("DensityCache: built without CDF");
    if (!(r > 0.0)) return 0.0;
    if (r < opts_.r_min) return gauss_cell(0.0, r);
    if (r <= opts_.r_max) return cdf_(std::log(r));
    // Tail through s = 1/r: int_{r_max}^{r} p = int_{1/r}^{1/r_max} p(1/s)/s^2 ds.
    return cdf_values_.back() + gauss_cell_inverse(1.0 / r, 1.0 / opts_.r_max);
  }

  /// Total mass on [0, inf) as measured by the cache's quadrature.
  double total_mass() const {
    if (!opts_.with_cdf) throw DomainError("DensityCache: built without CDF");
    return cdf_values_.back() + gauss_cell_inverse(0.0, 1.0 / opts_.r_max);
  }

  const std::vector<double>& grid() const { return r_; }
  const std::vector<double>& pdf_values() const { return p_; }
  const ParabolicHermite& log_interpolant() const { return log_pdf_; }

 private:
  void build() {
    const std::size_t n = opts_.points;
    const double lo = std::log(opts_.r_min), hi = std::log(opts_.r_max);
    r_.resize(n);
    p_.resize(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    // The density obeys p(1/r) = r^2 p(r); on a reciprocal grid only the
    // lower half is evaluated.
    const bool mirrored = std::fabs(lo + hi) < 1e-12 && n % 2 == 0;
    const std::size_t half = mirrored ? n / 2 : n;
    for (std::size_t i = 0; i < half; ++i) {
      r_[i] = std::exp(x[i]);
      p_[i] = direct(r_[i]);
    }
    if (mirrored) {
      for (std::size_t i = 0; i < half; ++i) {
        const std::size_t j = n - 1 - i;
        x[j] = -x[i];
        r_[j] = 1.0 / r_[i];
        p_[j] = r_[i] * r_[i] * p_[i];
      }
    }
    std::vector<double> logp(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(p_[i] > 0.0)) throw DomainError("DensityCache: non-positive density on grid");
      logp[i] = std::log(p_[i]);
    }
    log_pdf_ = ParabolicHermite(x, logp);
    if (!opts_.with_cdf) return;

    cdf_values_.assign(n, 0.0);
    cdf_values_[0] = gauss_cell(0.0, r_[0]);
    for (std::size_t i = 0; i + 1 < half; ++i) cdf_values_[i + 1] = cdf_values_[i] + gauss_cell(r_[i], r_[i + 1]);
    if (mirrored) {
      // F(1/r) = M - F(r) with M = 2 F(1).
      const double f_one = cdf_values_[half - 1] + gauss_cell(r_[half - 1], 1.0);
      const double mass = 2.0 * f_one;
      for (std::size_t i = 0; i < half; ++i) cdf_values_[n - 1 - i] = mass - cdf_values_[i];
    }
    std::vector<double> slopes(n);
    for (std::size_t i = 0; i < n; ++i) slopes[i] = r_[i] * p_[i];
    cdf_ = CubicHermite(x, cdf_values_, slopes);
  }

  // Gauss-Legendre over [a, b] in r (uses ln r when a > 0).
  double gauss_cell(double a, double b) const {
    static const auto rule = make_rule(10);
    double s = 0.0;
    if (a > 0.0) {
      const double la = std::log(a), lb = std::log(b);
      const double c = 0.5 * (la + lb), h = 0.5 * (lb - la);
      for (std::size_t i = 0; i < rule.first.size(); ++i) {
        const double r = std::exp(c + h * rule.first[i]);
        s += rule.second[i] * r * direct(r);
      }
      return s * h;
    }
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.first.size(); ++i) s += rule.second[i] * direct(c + h * rule.first[i]);
    return s * h;
  }

  // int_a^b p(1/s)/s^2 ds.
  double gauss_cell_inverse(double a, double b) const {
    static const auto rule = make_rule(10);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.first.size(); ++i) {
      const double t = c + h * rule.first[i];
      s += rule.second[i] * direct(1.0 / t) / (t * t);
    }
    return s * h;
  }

  static std::pair<std::vector<double>, std::vector<double>> make_rule(int n) {
    std::pair<std::vector<double>, std::vector<double>> rule;
    gauss_legendre(n, rule.first, rule.second);
    return rule;
  }

  SymmetryClass cls_;
  double k_;
  CacheOptions opts_;
  std::vector<double> r_, p_, cdf_values_;
  ParabolicHermite log_pdf_;
  CubicHermite cdf_;
};

/// Density caches at k = 0, 1/(K-1), ..., 1 for one symmetry class.
class CouplingTable {
 public:
  explicit CouplingTable(SymmetryClass cls, std::size_t k_nodes = 101, CacheOptions opts = {})
      : cls_(cls), opts_(opts) {
    if (k_nodes < 4) throw DomainError("CouplingTable: need >= 4 k nodes");
    opts_.with_cdf = false;
    caches_.reserve(k_nodes);
    for (std::size_t j = 0; j < k_nodes; ++j)
      caches_.emplace_back(cls, static_cast<double>(j) / static_cast<double>(k_nodes - 1), opts_);
  }

  /// Process-wide table per (class, node count), built on first use.
  static const CouplingTable& shared(SymmetryClass cls, std::size_t k_nodes = 101) {
    static std::mutex mu;
    static std::map<std::pair<int, std::size_t>, std::unique_ptr<CouplingTable>> tables;
    std::lock_guard lock(mu);
    auto& slot = tables[{beta_of(cls), k_nodes}];
    if (!slot) slot = std::make_unique<CouplingTable>(cls, k_nodes);
    return *slot;
  }

  SymmetryClass symmetry() const { return cls_; }
  std::size_t size() const { return caches_.size(); }
  double node(std::size_t j) const { return caches_[j].k(); }
  double step() const { return 1.0 / static_cast<double>(caches_.size() - 1); }
  const DensityCache& cache(std::size_t j) const { return caches_[j]; }
  const CacheOptions& options() const { return opts_; }

 private:
  SymmetryClass cls_;
  CacheOptions opts_;
  std::vector<DensityCache> caches_;
};

}  // namespace ratio_rmt
