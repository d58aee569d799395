#pragma once

// Brute-force validators. Each one reaches a density through a route the
// closed forms were not derived from here: 2-D quadrature of the joint
// eigenvalue density, Monte Carlo sampling, or direct principal-value
// quadrature of the master integral.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ratio_rmt/analytic.hpp"
#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/statistics.hpp"

namespace ratio_rmt {

struct ComparisonReport {
  std::vector<double> grid;
  std::vector<double> reference;
  std::vector<double> candidate;
  double sup_norm = 0.0;
  double ks_distance = 0.0;
  std::size_t n_samples = 0;
};

template <class F, class G>
ComparisonReport compare_densities(F&& f, G&& g, std::span<const double> grid) {
  ComparisonReport rep;
  rep.grid.assign(grid.begin(), grid.end());
  for (double r : grid) {
    rep.reference.push_back(f(r));
    rep.candidate.push_back(g(r));
    rep.sup_norm = std::max(rep.sup_norm, std::fabs(rep.reference.back() - rep.candidate.back()));
  }
  return rep;
}

/// Oracle tolerances: tighter than the evaluator defaults.
inline QuadratureSpec oracle_spec() {
  QuadratureSpec q;
  q.abs_tol = 1e-12;
  q.rel_tol = 1e-9;
  q.max_subdivisions = 2000;
  return q;
}

/// p(k; r) = int dl int_0^inf dx x 3! P(l - x, l + r x, l), with P the joint
/// density of unordered eigenvalues. Returns value and error estimate.
inline QuadResult joint_quadrature_estimate(SymmetryClass cls, double k, double r,
                                            const QuadratureSpec& quad = oracle_spec()) {
  quad.validate();
  detail::require_open_coupling(k, "pdf_via_joint_quadrature");
  detail::require_ratio(r, "pdf_via_joint_quadrature");
  const double sigma = cls == SymmetryClass::Unitary ? 1.0 / std::sqrt(2.0) : 1.0;
  const double t = quad.truncation_sigmas * sigma;
  const double xmax = 2.0 * t / std::max(1.0, r);

  const QuadratureSpec mid = detail::inner_spec(quad, 0.1);
  bool ok = true;
  double inner_err = 0.0;
  auto joint = [&](double a, double b, double c) {
    return cls == SymmetryClass::Unitary ? joint_density_beta2(k, a, b, c) : joint_density_beta1(k, a, b, c, mid);
  };
  auto over_x = [&](double l) {
    auto f = [&](double x) { return 6.0 * x * joint(l - x, l + r * x, l); };
    std::vector<double> pts{0.0};
    for (double p : {0.25, 0.5, 1.0, 2.0, 4.0})
      if (p * sigma < xmax) pts.push_back(p * sigma);
    pts.push_back(xmax);
    const auto res = adaptive_integrate(f, std::span<const double>(pts), mid);
    ok = ok && res.converged;
    inner_err = std::max(inner_err, res.abs_error);
    return res.value;
  };
  const std::array<double, 5> lpts{-t, -sigma, 0.0, sigma, t};
  auto out = adaptive_integrate(over_x, std::span<const double>(lpts), quad);
  out.converged = out.converged && ok;
  out.abs_error += 2.0 * t * inner_err;
  return out;
}

inline double pdf_via_joint_quadrature(SymmetryClass cls, double k, double r, const QuadratureSpec& quad = oracle_spec()) {
  const auto res = joint_quadrature_estimate(cls, k, r, quad);
  return detail::checked(res, "pdf_via_joint_quadrature");
}

/// Histogram of n simulated ratios on bins `edges` against the model's bin
/// averages (F(b) - F(a)) / (b - a), plus the KS distance to `model_cdf`.
/// The report grid holds bin centres.
template <class Cdf>
ComparisonReport pdf_via_monte_carlo(SymmetryClass cls, double k, std::span<const double> edges, std::size_t n,
                                     std::uint64_t seed, Cdf&& model_cdf, unsigned threads = 0) {
  if (n < 10000) throw DomainError("pdf_via_monte_carlo: n must be >= 1e4");
  auto sample = sample_ratios(cls, Coupling{k}, n, seed, threads);
  std::sort(sample.ratios.begin(), sample.ratios.end());
  const auto h = build_histogram(sample.ratios, edges);
  const auto dens = h.density();
  ComparisonReport rep;
  rep.n_samples = n;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    rep.grid.push_back(h.center(i));
    rep.reference.push_back((model_cdf(h.edges[i + 1]) - model_cdf(h.edges[i])) / h.width(i));
    rep.candidate.push_back(dens[i]);
    rep.sup_norm = std::max(rep.sup_norm, std::fabs(rep.reference.back() - rep.candidate.back()));
  }
  rep.ks_distance = ks_distance_sorted(sample.ratios, model_cdf);
  return rep;
}

/// Left-hand side of the master-integral identity,
///   int_0^inf dx x^4 e^{-alpha^2 x^2} PV int dl e^{-gamma^2 l^2 + 2 eta x l} x / ((2l + u x)(2l + v x)),
/// with each principal value folded symmetrically about its pole:
///   PV int g(l)/(2l + w x) dl = 1/2 int_0^inf [g(l0 + s) - g(l0 - s)] / s ds,  l0 = -w x / 2.
inline double master_integral_pv(const MasterIntegralParams& p, const QuadratureSpec& quad = oracle_spec()) {
  p.validate();
  quad.validate();
  const double a = std::sqrt(p.a2());
  const double gamma = std::sqrt(p.gamma2);
  const QuadratureSpec inner = detail::inner_spec(quad, 0.1);
  bool ok = true;
  auto pv = [&](double w, double x) {
    const double l0 = -0.5 * w * x;
    const double centre = p.eta * x / p.gamma2;
    auto g = [&](double l) { return std::exp(-p.gamma2 * l * l + 2.0 * p.eta * x * l - p.eta * p.eta * x * x / p.gamma2); };
    auto f = [&](double s) { return (g(l0 + s) - g(l0 - s)) / s; };
    const double dist = std::fabs(centre - l0);
    const double width = quad.truncation_sigmas / gamma;
    std::vector<double> pts{0.0};
    if (dist > 0.0) pts.push_back(dist);
    pts.push_back(dist + width);
    const auto res = adaptive_integrate(f, std::span<const double>(pts), inner);
    ok = ok && res.converged;
    return 0.5 * res.value;
  };
  // The Gaussian shift e^{eta^2 x^2 / gamma^2} is moved into the x-weight.
  auto outer = [&](double x) {
    return std::pow(x, 4) * std::exp(-p.a2() * x * x) * (pv(p.u, x) - pv(p.v, x)) / (p.v - p.u);
  };
  const double peak = std::sqrt(2.0) / a;
  const std::array<double, 4> pts{0.0, peak, 2.0 * peak, peak + quad.truncation_sigmas / a};
  const auto res = adaptive_integrate(outer, std::span<const double>(pts), quad);
  if (!res.converged || !ok)
    throw ConvergenceError("master_integral_pv: quadrature did not converge", res.value, res.abs_error);
  return res.value;
}

// ---------------------------------------------------------------------------
// Pinned oracle values

struct FixtureRecord {
  int beta = 2;
  double k = 0.0;
  double r = 0.0;
  double value = 0.0;
  double abs_err_bound = 0.0;
  std::string spec_hash;
};

inline constexpr const char* kFixtureHeader = "# ratio-rmt oracle fixtures v1";

inline void write_fixtures(std::ostream& os, const std::vector<FixtureRecord>& recs, const QuadratureSpec& spec) {
  os << kFixtureHeader << '\n';
  os << "# quadrature " << spec.to_string() << '\n';
  os << "beta,k,r,value,abs_err_bound,spec_hash\n";
  char buf[256];
  for (const auto& f : recs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.3g,%s\n", f.beta, f.k, f.r, f.value, f.abs_err_bound,
                  f.spec_hash.c_str());
    os << buf;
  }
}

inline std::vector<FixtureRecord> read_fixtures(std::istream& is) {
  std::vector<FixtureRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false, seen_version = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind(kFixtureHeader, 0) == 0) seen_version = true;
    if (line[0] == '#') continue;
    if (!seen_header) {
      if (line != "beta,k,r,value,abs_err_bound,spec_hash")
        throw DomainError("fixtures line " + std::to_string(lineno) + ": bad column header");
      seen_header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw DomainError("fixtures line " + std::to_string(lineno) + ": expected 6 fields");
    FixtureRecord f;
    try {
      f.beta = std::stoi(cells[0]);
      f.k = std::stod(cells[1]);
      f.r = std::stod(cells[2]);
      f.value = std::stod(cells[3]);
      f.abs_err_bound = std::stod(cells[4]);
    } catch (const std::exception&) {
      throw DomainError("fixtures line " + std::to_string(lineno) + ": unparseable number");
    }
    f.spec_hash = cells[5];
    out.push_back(f);
  }
  if (!seen_version) throw DomainError("fixtures: missing version header");
  return out;
}

inline std::vector<FixtureRecord> read_fixtures_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("fixtures: cannot open " + path);
  return read_fixtures(in);
}

/// Oracle value for one record, recomputed under `spec`.
inline FixtureRecord derive_fixture(int beta, double k, double r, const QuadratureSpec& spec = oracle_spec()) {
  const auto res = joint_quadrature_estimate(symmetry_from_beta(beta), k, r, spec);
  FixtureRecord f{beta, k, r, detail::checked(res, "derive_fixture"), res.abs_error, spec.hash()};
  return f;
}

}  // namespace ratio_rmt
