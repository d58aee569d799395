#pragma once

// Estimating k from a ratio sample.
//
// Both estimators work on a CouplingTable (densities at k = 0, 0.01, ..., 1).
// Every per-node quantity is a sum over ratios, and the objective between
// nodes is a Catmull-Rom interpolant of the node values, so a bootstrap
// resample only re-weights per-ratio contributions already computed.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ratio_rmt/density_cache.hpp"
#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/random.hpp"
#include "ratio_rmt/statistics.hpp"

namespace ratio_rmt {

enum class FitMethod { MLE, HistogramLeastSquares };

inline const char* to_string(FitMethod m) { return m == FitMethod::MLE ? "mle" : "histogram-least-squares"; }

/// The likelihood does not single out any k in [0, 1].
class NonIdentifiableError : public std::runtime_error {
 public:
  NonIdentifiableError(const std::string& what, double spread) : std::runtime_error(what), spread_(spread) {}
  /// max - min of the objective over the k-nodes.
  double spread() const noexcept { return spread_; }

 private:
  double spread_;
};

inline constexpr double kLogFloor = -690.77552789821368;  // ln(1e-300)
inline constexpr std::size_t kSmallSample = 100;

struct FitOptions {
  double tol = 1e-4;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
  /// Objective spread (nats for MLE) below which the fit is non-identifiable.
  double flat_tolerance = 1e-6;
  std::size_t k_nodes = 101;
  unsigned threads = 0;
  /// Build an exact cache at k_hat for the reported log-likelihood and KS.
  bool exact_diagnostics = true;
  /// Histogram least-squares binning.
  std::vector<double> edges = uniform_edges(0.0, 5.0, 50);
};

struct FitResult {
  int beta = 1;
  FitMethod method = FitMethod::MLE;
  double k_hat = 0.0;
  double log_likelihood = 0.0;
  double ks_statistic = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::size_t n_used = 0;
  std::size_t n_floored = 0;
  std::size_t bootstrap_resamples = 0;
  bool small_sample_warning = false;
  bool used_fallback = false;
};

struct LogLikelihood {
  double value = 0.0;
  std::size_t floored = 0;
};

namespace detail {

inline double floored_log(double p, std::size_t& floored) {
  if (!(p > 1e-300)) {
    ++floored;
    return kLogFloor;
  }
  return std::log(p);
}

inline void require_sample(std::span<const double> ratios, const char* who) {
  if (ratios.empty()) throw DomainError(std::string(who) + ": empty sample");
  for (double r : ratios)
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError(std::string(who) + ": ratios must be finite and >= 0");
}

}  // namespace detail

/// Sum of ln p(k; r_i) from a cache; terms below ln(1e-300) are floored and counted.
inline LogLikelihood log_likelihood(std::span<const double> ratios, const DensityCache& cache) {
  detail::require_sample(ratios, "log_likelihood");
  LogLikelihood out;
  for (double r : ratios) {
    double l;
    if (r >= cache.r_min() && r <= cache.r_max()) {
      l = cache.log_interpolant()(std::log(r));
      if (l < kLogFloor) {
        ++out.floored;
        l = kLogFloor;
      }
    } else {
      l = detail::floored_log(cache.direct(r), out.floored);
    }
    out.value += l;
  }
  return out;
}

inline LogLikelihood log_likelihood(std::span<const double> ratios, SymmetryClass cls, double k,
                                    CacheOptions opts = {}) {
  detail::require_sample(ratios, "log_likelihood");
  opts.with_cdf = false;
  return log_likelihood(ratios, DensityCache(cls, k, opts));
}

inline LogLikelihood log_likelihood(const RatioSample& sample, SymmetryClass cls, double k) {
  return log_likelihood(std::span<const double>(sample.ratios), cls, k);
}

/// KS distance between the sample's empirical CDF and the model CDF at k.
inline double ks_statistic(std::span<const double> ratios, const DensityCache& cache) {
  return ks_distance(ratios, [&](double r) { return cache.cdf(r); });
}

inline double ks_statistic(std::span<const double> ratios, SymmetryClass cls, double k) {
  detail::require_sample(ratios, "ks_statistic");
  return ks_statistic(ratios, DensityCache(cls, k));
}

/// Per-node log-likelihood sums over a fixed sample, for arbitrary integer
/// weights. Inside the cache grid ln p is a cubic in the local cell
/// coordinate, so a weighted sum needs only the weighted moments of t per
/// cell. Ratios outside the grid keep their full per-node row.
class TableLikelihood {
 public:
  TableLikelihood(const CouplingTable& table, std::span<const double> ratios) : table_(table), n_(ratios.size()) {
    detail::require_sample(ratios, "TableLikelihood");
    const auto& first = table.cache(0);
    const auto& interp = first.log_interpolant();
    cells_ = interp.nodes().size() - 1;
    const std::size_t kn = table.size();
    coef_.resize(kn * cells_ * 4);
    for (std::size_t j = 0; j < kn; ++j) {
      const auto& li = table.cache(j).log_interpolant();
      for (std::size_t m = 0; m < cells_; ++m) {
        const auto c = li.cell_coefficients(m);
        std::copy(c.begin(), c.end(), coef_.begin() + static_cast<std::ptrdiff_t>((j * cells_ + m) * 4));
      }
    }
    cell_.resize(n_);
    t_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = ratios[i];
      if (r >= first.r_min() && r <= first.r_max()) {
        const auto [m, t] = interp.cell(std::log(r));
        cell_[i] = static_cast<std::int32_t>(m);
        t_[i] = t;
      } else {
        cell_[i] = -1 - static_cast<std::int32_t>(outside_index_.size());
        outside_index_.push_back(i);
        std::size_t floored = 0;
        for (std::size_t j = 0; j < kn; ++j) outside_rows_.push_back(detail::floored_log(table.cache(j).direct(r), floored));
        floored_ += floored > 0 ? 1 : 0;
      }
    }
  }

  std::size_t size() const { return n_; }
  std::size_t nodes() const { return table_.size(); }
  const CouplingTable& table() const { return table_; }
  /// Ratios whose log-density hit the floor at one or more nodes.
  std::size_t floored() const { return floored_; }

  /// S_j = sum_i w_i ln p(k_j; r_i); empty weights mean all ones.
  std::vector<double> node_sums(std::span<const std::uint32_t> weights = {}) const {
    const std::size_t kn = table_.size();
    std::vector<double> moments(cells_ * 4, 0.0);
    std::vector<double> s(kn, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
      if (w == 0.0) continue;
      if (cell_[i] >= 0) {
        const double t = t_[i];
        double* mo = &moments[static_cast<std::size_t>(cell_[i]) * 4];
        mo[0] += w;
        mo[1] += w * t;
        mo[2] += w * t * t;
        mo[3] += w * t * t * t;
      } else {
        const std::size_t row = static_cast<std::size_t>(-1 - cell_[i]);
        for (std::size_t j = 0; j < kn; ++j) s[j] += w * outside_rows_[row * kn + j];
      }
    }
    for (std::size_t j = 0; j < kn; ++j) {
      const double* c = &coef_[j * cells_ * 4];
      double acc = 0.0;
      for (std::size_t q = 0; q < cells_ * 4; ++q) acc += c[q] * moments[q];
      s[j] += acc;
    }
    return s;
  }

 private:
  const CouplingTable& table_;
  std::size_t n_;
  std::size_t cells_ = 0;
  std::vector<double> coef_;
  std::vector<std::int32_t> cell_;
  std::vector<double> t_;
  std::vector<std::size_t> outside_index_;
  std::vector<double> outside_rows_;
  std::size_t floored_ = 0;
};

struct UnitMaximum {
  double x = 0.0;
  double value = 0.0;
  bool used_fallback = false;
};

/// Maximizes f on [0, 1] by golden-section search to `tol`. If a node value
/// beats the golden-section optimum (the objective was not unimodal), the
/// search is repeated on the bracket around the best node.
template <class F>
UnitMaximum maximize_on_unit(F&& f, std::span<const double> node_values, double tol) {
  auto golden = [&](double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f(d);
      }
    }
    // Endpoints are candidates too: the maximum may sit on the boundary.
    UnitMaximum best{0.5 * (a + b), f(0.5 * (a + b)), false};
    for (double x : {a, b}) {
      const double v = f(x);
      if (v > best.value) best = {x, v, false};
    }
    return best;
  };
  UnitMaximum best = golden(0.0, 1.0);
  const std::size_t kn = node_values.size();
  std::size_t jbest = 0;
  for (std::size_t j = 1; j < kn; ++j)
    if (node_values[j] > node_values[jbest]) jbest = j;
  const double margin = 1e-9 * std::max(1.0, std::fabs(best.value));
  if (node_values[jbest] > best.value + margin) {
    const double h = 1.0 / static_cast<double>(kn - 1);
    const double lo = std::max(0.0, static_cast<double>(jbest) * h - h);
    const double hi = std::min(1.0, static_cast<double>(jbest) * h + h);
    best = golden(lo, hi);
    best.used_fallback = true;
  }
  return best;
}

namespace detail {

/// Multinomial resample counts for bootstrap replicate b.
inline std::vector<std::uint32_t> resample_weights(std::size_t n, std::uint64_t seed, std::uint64_t b) {
  Substream rng(seed, b);
  std::vector<std::uint32_t> w(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
    ++w[idx];
  }
  return w;
}

/// Runs estimate(b) for b in [0, count) on up to `threads` workers; results in b order.
template <class F>
std::vector<double> parallel_replicates(std::size_t count, unsigned threads, F&& estimate) {
  std::vector<double> out(count, 0.0);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(1, count)));
  auto job = [&](unsigned w) {
    for (std::size_t b = w; b < count; b += workers) out[b] = estimate(b);
  };
  if (workers <= 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  return out;
}

inline void apply_interval(FitResult& res, std::vector<double> boots) {
  res.bootstrap_resamples = boots.size();
  if (boots.empty()) {
    res.ci_low = res.ci_high = res.k_hat;
    return;
  }
  std::sort(boots.begin(), boots.end());
  // Percentile interval, widened to contain the point estimate.
  res.ci_low = std::min(quantile_sorted(boots, 0.025), res.k_hat);
  res.ci_high = std::max(quantile_sorted(boots, 0.975), res.k_hat);
}

inline void check_identifiable(std::span<const double> node_values, double tolerance, const char* who) {
  const auto [lo, hi] = std::minmax_element(node_values.begin(), node_values.end());
  const double spread = *hi - *lo;
  if (!(spread >= tolerance))
    throw NonIdentifiableError(std::string(who) + ": objective flat across k in [0, 1]", spread);
}

inline void finish_fit(FitResult& res, std::span<const double> ratios, SymmetryClass cls, const FitOptions& opts) {
  if (!opts.exact_diagnostics) return;
  const DensityCache cache(cls, res.k_hat);
  const auto ll = log_likelihood(ratios, cache);
  res.log_likelihood = ll.value;
  res.n_floored = ll.floored;
  res.ks_statistic = ks_statistic(ratios, cache);
}

}  // namespace detail

/// Maximum-likelihood k on [0, 1] with a percentile bootstrap interval.
inline FitResult fit_k_mle(std::span<const double> ratios, SymmetryClass cls, const FitOptions& opts = {},
                           const CouplingTable* table = nullptr) {
  detail::require_sample(ratios, "fit_k_mle");
  if (!(opts.tol > 0.0)) throw DomainError("fit_k_mle: tol must be > 0");
  const CouplingTable& tab = table ? *table : CouplingTable::shared(cls, opts.k_nodes);
  if (tab.symmetry() != cls) throw DomainError("fit_k_mle: table symmetry class mismatch");
  const TableLikelihood lik(tab, ratios);
  const double step = tab.step();

  auto solve = [&](std::span<const std::uint32_t> w) {
    const auto sums = lik.node_sums(w);
    const UniformCatmullRom curve(0.0, step, sums);
    return std::pair{maximize_on_unit(curve, sums, opts.tol), sums};
  };

  const auto [best, sums] = solve({});
  detail::check_identifiable(sums, opts.flat_tolerance, "fit_k_mle");

  FitResult res;
  res.beta = beta_of(cls);
  res.method = FitMethod::MLE;
  res.k_hat = std::clamp(best.x, 0.0, 1.0);
  res.log_likelihood = best.value;
  res.n_used = ratios.size();
  res.n_floored = lik.floored();
  res.small_sample_warning = ratios.size() < kSmallSample;
  res.used_fallback = best.used_fallback;

  auto boots = detail::parallel_replicates(opts.bootstrap, opts.threads, [&](std::size_t b) {
    const auto w = detail::resample_weights(ratios.size(), opts.seed, b);
    return std::clamp(solve(w).first.x, 0.0, 1.0);
  });
  detail::apply_interval(res, std::move(boots));
  detail::finish_fit(res, ratios, cls, opts);
  return res;
}

inline FitResult fit_k_mle(const RatioSample& sample, SymmetryClass cls, const FitOptions& opts = {}) {
  return fit_k_mle(std::span<const double>(sample.ratios), cls, opts);
}

/// Least-squares match of the histogram density to bin-averaged model
/// densities (Simpson's rule per bin). The value maximized is minus the
/// residual sum of squares.
inline FitResult fit_k_histogram(std::span<const double> ratios, SymmetryClass cls, const FitOptions& opts = {},
                                 const CouplingTable* table = nullptr) {
  detail::require_sample(ratios, "fit_k_histogram");
  const CouplingTable& tab = table ? *table : CouplingTable::shared(cls, opts.k_nodes);
  if (tab.symmetry() != cls) throw DomainError("fit_k_histogram: table symmetry class mismatch");
  const std::size_t kn = tab.size();
  const auto base = build_histogram(ratios, opts.edges);
  const std::size_t bins = base.bins();
  std::vector<std::vector<double>> model(bins, std::vector<double>(kn));
  for (std::size_t m = 0; m < bins; ++m)
    for (std::size_t j = 0; j < kn; ++j) {
      const auto& c = tab.cache(j);
      model[m][j] = (c.pdf(base.edges[m]) + 4.0 * c.pdf(base.center(m)) + c.pdf(base.edges[m + 1])) / 6.0;
    }
  std::vector<UniformCatmullRom> curves;
  for (std::size_t m = 0; m < bins; ++m) curves.emplace_back(0.0, tab.step(), model[m]);

  // Bin index per ratio (-1 outside), so resampled histograms are cheap.
  std::vector<std::ptrdiff_t> bin_of(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) bin_of[i] = bin_index(base.edges, ratios[i]);

  auto solve = [&](std::span<const std::uint32_t> w) {
    std::vector<double> counts(bins, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      const double wi = w.empty() ? 1.0 : static_cast<double>(w[i]);
      total += wi;
      if (bin_of[i] >= 0) counts[static_cast<std::size_t>(bin_of[i])] += wi;
    }
    std::vector<double> h(bins);
    for (std::size_t m = 0; m < bins; ++m) h[m] = counts[m] / (total * base.width(m));
    auto objective = [&](double k) {
      double s = 0.0;
      for (std::size_t m = 0; m < bins; ++m) {
        const double d = h[m] - curves[m](k);
        s += d * d;
      }
      return -s;
    };
    std::vector<double> nodes(kn);
    for (std::size_t j = 0; j < kn; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < bins; ++m) s += (h[m] - model[m][j]) * (h[m] - model[m][j]);
      nodes[j] = -s;
    }
    return std::pair{maximize_on_unit(objective, nodes, opts.tol), nodes};
  };

  const auto [best, nodes] = solve({});
  // The objective is in squared density units; only an exactly flat profile is rejected.
  detail::check_identifiable(nodes, 1e-15, "fit_k_histogram");

  FitResult res;
  res.beta = beta_of(cls);
  res.method = FitMethod::HistogramLeastSquares;
  res.k_hat = std::clamp(best.x, 0.0, 1.0);
  res.n_used = ratios.size();
  res.small_sample_warning = ratios.size() < kSmallSample;
  res.used_fallback = best.used_fallback;
  auto boots = detail::parallel_replicates(opts.bootstrap, opts.threads, [&](std::size_t b) {
    const auto w = detail::resample_weights(ratios.size(), opts.seed, b);
    return std::clamp(solve(w).first.x, 0.0, 1.0);
  });
  detail::apply_interval(res, std::move(boots));
  if (opts.exact_diagnostics) {
    detail::finish_fit(res, ratios, cls, opts);
  } else {
    const TableLikelihood lik(tab, ratios);
    const auto sums = lik.node_sums();
    res.log_likelihood = UniformCatmullRom(0.0, tab.step(), sums)(res.k_hat);
    res.n_floored = lik.floored();
  }
  return res;
}

}  // namespace ratio_rmt
