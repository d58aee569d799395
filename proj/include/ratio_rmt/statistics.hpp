#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ratio_rmt/numerics.hpp"

namespace ratio_rmt {

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t overflow_count = 0;  ///< values outside [edges.front(), edges.back()]
  std::size_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }

  /// counts / (total * width); zero when the histogram is empty.
  std::vector<double> density() const {
    std::vector<double> d(counts.size(), 0.0);
    if (total == 0) return d;
    for (std::size_t i = 0; i < counts.size(); ++i)
      d[i] = static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
    return d;
  }
};

/// Bin of v for ascending edges: [e_i, e_{i+1}), the last bin closed; -1 outside.
inline std::ptrdiff_t bin_index(std::span<const double> edges, double v) {
  if (!(v >= edges.front() && v <= edges.back())) return -1;
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  const auto i = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
  return std::min(i, static_cast<std::ptrdiff_t>(edges.size()) - 2);
}

inline Histogram build_histogram(std::span<const double> values, std::span<const double> edges) {
  if (edges.size() < 2) throw DomainError("build_histogram: need at least 2 edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1])) throw DomainError("build_histogram: edges must be strictly ascending");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  h.total = values.size();
  for (double v : values) {
    const auto i = bin_index(edges, v);
    if (i < 0)
      ++h.overflow_count;
    else
      ++h.counts[static_cast<std::size_t>(i)];
  }
  return h;
}

/// n + 1 edges equally spaced on [lo, hi].
inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins < 1 || !(lo < hi)) throw DomainError("uniform_edges: need bins >= 1 and lo < hi");
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  e.back() = hi;
  return e;
}

/// One-sample Kolmogorov-Smirnov distance of an ascending sample from `cdf`.
template <class Cdf>
double ks_distance_sorted(std::span<const double> sorted, Cdf&& cdf) {
  if (sorted.empty()) throw DomainError("ks_distance: empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

template <class Cdf>
double ks_distance(std::span<const double> sample, Cdf&& cdf) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return ks_distance_sorted(s, cdf);
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_distance_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

/// Linear-interpolation quantile (type 7) of an ascending sequence.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile_sorted: empty input");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace ratio_rmt
