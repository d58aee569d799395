#pragma once

// Seeded sampling of the coupled 3x3 Gaussian model, Jacobi
// diagonalisation, entropy-based localized-state identification and
// spacing-ratio extraction.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "ratio_rmt/numerics.hpp"
#include "ratio_rmt/random.hpp"

namespace ratio_rmt {

enum class SymmetryClass { Orthogonal = 1, Unitary = 2 };

inline int beta_of(SymmetryClass c) { return static_cast<int>(c); }

inline SymmetryClass symmetry_from_beta(int beta) {
  if (beta == 1) return SymmetryClass::Orthogonal;
  if (beta == 2) return SymmetryClass::Unitary;
  throw DomainError("beta must be 1 or 2");
}

/// Coupling strength between the localized level and the generic 2x2 block.
struct Coupling {
  double k = 0.0;

  /// Variance ratio k^2/(2-k^2) carried by the localized diagonal entry.
  double localized_variance() const { return k * k / (2.0 - k * k); }
  bool in_analytic_range() const { return k >= 0.0 && k <= 1.0; }

  /// Accepts the full sampler domain 0 <= k, k^2 < 2.
  static Coupling for_sampling(double k) {
    if (!std::isfinite(k) || k < 0.0 || k * k >= 2.0)
      throw DomainError("coupling k must satisfy 0 <= k and k^2 < 2, got " + std::to_string(k));
    return {k};
  }
  /// Analytic densities are defined for 0 <= k <= 1.
  static Coupling for_analytic(double k) {
    if (!std::isfinite(k) || k < 0.0 || k > 1.0)
      throw DomainError("coupling k must lie in [0, 1], got " + std::to_string(k));
    return {k};
  }
};

namespace detail {
inline double conj_of(double x) { return x; }
inline std::complex<double> conj_of(std::complex<double> x) { return std::conj(x); }
inline double real_of(double x) { return x; }
inline double real_of(std::complex<double> x) { return x.real(); }
inline double abs2(double x) { return x * x; }
inline double abs2(std::complex<double> x) { return std::norm(x); }
}  // namespace detail

template <class Scalar>
concept MatrixScalar = std::same_as<Scalar, double> || std::same_as<Scalar, std::complex<double>>;

/// Dense 3x3 self-adjoint matrix: real symmetric (double) or complex
/// Hermitian (std::complex<double>).
template <MatrixScalar Scalar>
struct Matrix3 {
  std::array<Scalar, 9> a{};

  Scalar& operator()(int i, int j) { return a[3 * i + j]; }
  const Scalar& operator()(int i, int j) const { return a[3 * i + j]; }

  static constexpr SymmetryClass symmetry() {
    return std::is_same_v<Scalar, double> ? SymmetryClass::Orthogonal : SymmetryClass::Unitary;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : a) s += detail::abs2(x);
    return std::sqrt(s);
  }

  bool is_self_adjoint(double tol = 0.0) const {
    for (int i = 0; i < 3; ++i) {
      if constexpr (!std::is_same_v<Scalar, double>) {
        if (std::fabs((*this)(i, i).imag()) > tol) return false;
      }
      for (int j = i + 1; j < 3; ++j)
        if (std::sqrt(detail::abs2((*this)(i, j) - detail::conj_of((*this)(j, i)))) > tol) return false;
    }
    return true;
  }
};

using RealMatrix3 = Matrix3<double>;
using ComplexMatrix3 = Matrix3<std::complex<double>>;

/// Eigen-decomposition sorted ascending: vectors[i] belongs to lambda[i].
template <MatrixScalar Scalar>
struct EigenTriple {
  std::array<double, 3> lambda{};
  std::array<std::array<Scalar, 3>, 3> vectors{};
  std::array<double, 3> entropy{};
  int localized_index = 0;
};

/// Draws one matrix with independent zero-mean Gaussian entries whose
/// variances follow the coupled model. Consumes 6 normals (real) or 9
/// (complex) in the fixed order H11, H22, H33, H12, H13, H23.
template <MatrixScalar Scalar>
Matrix3<Scalar> sample_matrix(Coupling coupling, Substream& rng) {
  const double k = coupling.k;
  if (!(k >= 0.0) || k * k >= 2.0) throw DomainError("sample_matrix: requires 0 <= k, k^2 < 2");
  const double v3 = coupling.localized_variance();
  Matrix3<Scalar> m;
  if constexpr (std::is_same_v<Scalar, double>) {
    m(0, 0) = rng.normal();
    m(1, 1) = rng.normal();
    m(2, 2) = std::sqrt(v3) * rng.normal();
    const double h12 = std::sqrt(0.5) * rng.normal();
    const double h13 = k * std::sqrt(0.5) * rng.normal();
    const double h23 = k * std::sqrt(0.5) * rng.normal();
    m(0, 1) = m(1, 0) = h12;
    m(0, 2) = m(2, 0) = h13;
    m(1, 2) = m(2, 1) = h23;
  } else {
    const double sd_diag = std::sqrt(0.5);
    m(0, 0) = sd_diag * rng.normal();
    m(1, 1) = sd_diag * rng.normal();
    m(2, 2) = std::sqrt(0.5 * v3) * rng.normal();
    auto offdiag = [&](double sd) {
      const double re = sd * rng.normal();
      const double im = sd * rng.normal();
      return std::complex<double>(re, im);
    };
    const auto h12 = offdiag(0.5);
    const auto h13 = offdiag(0.5 * k);
    const auto h23 = offdiag(0.5 * k);
    m(0, 1) = h12;
    m(1, 0) = std::conj(h12);
    m(0, 2) = h13;
    m(2, 0) = std::conj(h13);
    m(1, 2) = h23;
    m(2, 1) = std::conj(h23);
  }
  return m;
}

/// S = -sum_j |v_j|^2 ln |v_j|^2, zero components contributing 0.
template <MatrixScalar Scalar>
double shannon_entropy(std::span<const Scalar, 3> v) {
  double norm2 = 0.0;
  for (const auto& x : v) norm2 += detail::abs2(x);
  if (!(std::fabs(std::sqrt(norm2) - 1.0) <= 1e-9))
    throw DomainError("shannon_entropy: vector is not normalised");
  double s = 0.0;
  for (const auto& x : v) {
    const double p = detail::abs2(x);
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::clamp(s, 0.0, std::log(3.0));
}

template <MatrixScalar Scalar>
double shannon_entropy(const std::array<Scalar, 3>& v) {
  return shannon_entropy<Scalar>(std::span<const Scalar, 3>(v));
}

/// Cyclic Jacobi diagonalisation (unitary rotations for the Hermitian case),
/// stopped once the off-diagonal Frobenius norm drops below 1e-13 * ||H||.
template <MatrixScalar Scalar>
EigenTriple<Scalar> eigensystem(const Matrix3<Scalar>& m) {
  using detail::abs2;
  using detail::conj_of;
  Matrix3<Scalar> A = m;
  Matrix3<Scalar> V;
  for (int i = 0; i < 3; ++i) V(i, i) = Scalar(1.0);
  const double norm = m.frobenius_norm();
  constexpr std::array<std::pair<int, int>, 3> pivots{{{0, 1}, {0, 2}, {1, 2}}};

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (auto [p, q] : pivots) off += 2.0 * abs2(A(p, q));
    if (std::sqrt(off) <= 1e-13 * norm) break;
    for (auto [p, q] : pivots) {
      const Scalar apq = A(p, q);
      const double mag = std::sqrt(abs2(apq));
      if (mag == 0.0) continue;
      const Scalar phase = apq / mag;
      const double tau = (detail::real_of(A(q, q)) - detail::real_of(A(p, p))) / (2.0 * mag);
      const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      // Rotation acting on columns p, q.
      const Scalar vpp = c, vpq = s;
      const Scalar vqp = -s * conj_of(phase), vqq = c * conj_of(phase);
      for (int i = 0; i < 3; ++i) {
        const Scalar aip = A(i, p), aiq = A(i, q);
        A(i, p) = aip * vpp + aiq * vqp;
        A(i, q) = aip * vpq + aiq * vqq;
        const Scalar wip = V(i, p), wiq = V(i, q);
        V(i, p) = wip * vpp + wiq * vqp;
        V(i, q) = wip * vpq + wiq * vqq;
      }
      for (int j = 0; j < 3; ++j) {
        const Scalar apj = A(p, j), aqj = A(q, j);
        A(p, j) = conj_of(vpp) * apj + conj_of(vqp) * aqj;
        A(q, j) = conj_of(vpq) * apj + conj_of(vqq) * aqj;
      }
      A(p, q) = A(q, p) = Scalar(0.0);
      A(p, p) = detail::real_of(A(p, p));
      A(q, q) = detail::real_of(A(q, q));
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return detail::real_of(A(x, x)) < detail::real_of(A(y, y));
  });
  EigenTriple<Scalar> out;
  for (int i = 0; i < 3; ++i) {
    out.lambda[i] = detail::real_of(A(order[i], order[i]));
    for (int j = 0; j < 3; ++j) out.vectors[i][j] = V(j, order[i]);
    out.entropy[i] = shannon_entropy<Scalar>(out.vectors[i]);
  }
  // Minimum entropy; near-ties resolved towards the lower eigenvalue.
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (out.entropy[i] < out.entropy[best] - 1e-12) best = i;
  out.localized_index = best;
  return out;
}

/// Upper-over-lower spacing ratio (e3 - e2)/(e2 - e1) of the sorted triple.
/// This single expression covers all three placements of the localized
/// level. Empty when the lower spacing is below 1e-12 of the spectral range.
inline std::optional<double> glr_ratio(const std::array<double, 3>& sorted) {
  const double lower = sorted[1] - sorted[0];
  const double upper = sorted[2] - sorted[1];
  const double range = sorted[2] - sorted[0];
  if (!(range > 0.0) || !(lower > 1e-12 * range)) return std::nullopt;
  return upper / lower;
}

template <MatrixScalar Scalar>
std::optional<double> glr_ratio(const EigenTriple<Scalar>& t) {
  return glr_ratio(t.lambda);
}

struct RatioSampleMeta {
  std::optional<SymmetryClass> symmetry;
  std::optional<double> k;
  std::string source;
  std::uint64_t seed = 0;
  std::size_t n_requested = 0;
  std::size_t n_discarded = 0;
  bool outside_fit_regime = false;
};

struct RatioSample {
  std::vector<double> ratios;
  RatioSampleMeta meta;

  std::size_t size() const { return ratios.size(); }
  bool empty() const { return ratios.empty(); }
};

namespace detail {

template <MatrixScalar Scalar>
double draw_ratio(Coupling coupling, std::uint64_t seed, std::uint64_t index, std::size_t& discarded) {
  Substream rng(seed, index);
  for (;;) {
    const auto triple = eigensystem(sample_matrix<Scalar>(coupling, rng));
    if (auto r = glr_ratio(triple)) return *r;
    ++discarded;
  }
}

template <MatrixScalar Scalar>
void fill_ratios(Coupling coupling, std::uint64_t seed, std::span<double> out, std::size_t offset,
                 std::size_t& discarded) {
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = draw_ratio<Scalar>(coupling, seed, offset + i, discarded);
}

}  // namespace detail

/// n spacing ratios from independent matrix draws. Draw i always uses
/// substream (seed, i); degenerate draws are re-drawn from the same
/// substream and counted, so output is independent of `threads`.
inline RatioSample sample_ratios(SymmetryClass cls, Coupling coupling, std::size_t n, std::uint64_t seed,
                                 unsigned threads = 0) {
  if (n < 1) throw DomainError("sample_ratios: n must be >= 1");
  coupling = Coupling::for_sampling(coupling.k);
  RatioSample out;
  out.ratios.assign(n, 0.0);
  out.meta.symmetry = cls;
  out.meta.k = coupling.k;
  out.meta.seed = seed;
  out.meta.n_requested = n;
  out.meta.outside_fit_regime = coupling.k > 1.0;
  char src[64];
  std::snprintf(src, sizeof src, "rmt3x3 beta=%d k=%.17g", beta_of(cls), coupling.k);
  out.meta.source = src;

  const unsigned workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(1, n / 1024));
  std::vector<std::size_t> discards(workers, 0);
  auto job = [&](unsigned w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    std::span<double> slice(out.ratios.data() + begin, end - begin);
    if (cls == SymmetryClass::Orthogonal)
      detail::fill_ratios<double>(coupling, seed, slice, begin, discards[w]);
    else
      detail::fill_ratios<std::complex<double>>(coupling, seed, slice, begin, discards[w]);
  };
  if (workers <= 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  out.meta.n_discarded = std::accumulate(discards.begin(), discards.end(), std::size_t{0});
  return out;
}

}  // namespace ratio_rmt
