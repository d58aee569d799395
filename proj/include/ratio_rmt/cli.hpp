#pragma once

// Command-line front end: simulate, pdf, fit, ingest, validate.
// Exit codes: 0 success, 1 numerical or domain failure, 2 usage or parse
// failure, 3 non-identifiable fit.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ratio_rmt/analytic.hpp"
#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/fitting.hpp"
#include "ratio_rmt/oracle.hpp"
#include "ratio_rmt/ratio_io.hpp"
#include "ratio_rmt/spectra.hpp"
#include "ratio_rmt/validation.hpp"

namespace ratio_rmt::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kNonIdentifiable = 3 };

struct Environment {
  /// Fixtures file used by `validate` when --fixtures is not given.
  std::string default_fixtures;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using nlohmann::json;

inline json to_json(const FitResult& f) {
  return json{{"kind", "fit_result"},
              {"version", kVersion},
              {"method", to_string(f.method)},
              {"beta", f.beta},
              {"k_hat", f.k_hat},
              {"ci_low", f.ci_low},
              {"ci_high", f.ci_high},
              {"ci_level", 0.95},
              {"log_likelihood", f.log_likelihood},
              {"ks_statistic", f.ks_statistic},
              {"n_used", f.n_used},
              {"n_floored", f.n_floored},
              {"bootstrap_resamples", f.bootstrap_resamples},
              {"small_sample_warning", f.small_sample_warning},
              {"used_fallback", f.used_fallback}};
}

/// Points pinned in the fixtures file: 25 log-spaced r in [0.05, 5] plus r = 1
/// for beta = 2 at k in {0.2, 0.5, 0.8} and beta = 1 at k in {0.2, 0.5}, and
/// the single point (beta = 1, k = 0.3, r = 1).
inline std::vector<std::tuple<int, double, double>> standard_fixture_points() {
  std::vector<double> rs;
  for (int i = 0; i < 25; ++i) rs.push_back(0.05 * std::pow(100.0, i / 24.0));
  rs.push_back(1.0);
  std::vector<std::tuple<int, double, double>> pts;
  for (double k : {0.2, 0.5, 0.8})
    for (double r : rs) pts.emplace_back(2, k, r);
  for (double k : {0.2, 0.5})
    for (double r : rs) pts.emplace_back(1, k, r);
  pts.emplace_back(1, 0.3, 1.0);
  return pts;
}

namespace detail {

/// Destination for command output: a file when a path is given, else `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("cannot open output file " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

inline void require_format(const std::string& f) {
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
}

inline void require_analytic_k(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw UsageError("--k must lie in [0, 1] for this command");
}

inline std::vector<double> make_grid(double lo, double hi, std::size_t points, const std::string& grid) {
  if (points < 1) throw UsageError("--points must be >= 1");
  if (!(lo >= 0.0) || !std::isfinite(hi)) throw UsageError("--r-min must be >= 0 and --r-max finite");
  if (points == 1) {
    if (lo != hi) throw UsageError("--points 1 requires --r-min == --r-max");
    return {lo};
  }
  if (!(lo < hi)) throw UsageError("--r-min must be < --r-max");
  std::vector<double> g(points);
  if (grid == "uniform") {
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  } else if (grid == "log") {
    if (!(lo > 0.0)) throw UsageError("--grid log requires --r-min > 0");
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  } else {
    throw UsageError("--grid must be uniform or log");
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline void write_ratios_json(std::ostream& os, const RatioSample& s, const HeaderFields& extra) {
  json j;
  j["kind"] = "ratios";
  for (const auto& [key, value] : ratio_header(s)) j[key] = value;
  for (const auto& [key, value] : extra) j[key] = value;
  j["ratios"] = s.ratios;
  os << j.dump(2) << '\n';
}

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err, const Environment& env = {}) {
  CLI::App app{"Spacing-ratio statistics of a localized level coupled to a random-matrix block", "ratio_rmt"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);

  int beta = 0;
  double k = -1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out_path, format = "csv";
  unsigned threads = 0;

  auto* sim = app.add_subcommand("simulate", "Sample spacing ratios from the 3x3 coupled ensemble");
  sim->add_option("--beta", beta, "Symmetry class (1 or 2)")->required()->check(CLI::IsMember({1, 2}));
  sim->add_option("--k", k, "Coupling, 0 <= k < sqrt(2)")->required();
  sim->add_option("--n", n, "Number of ratios")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--threads", threads, "Worker threads (0: RATIO_RMT_THREADS or hardware)");
  sim->add_option("--format", format, "csv (ratios file) or json");
  sim->add_option("--out", out_path, "Output path (default stdout)");

  double r_min = 0.0, r_max = 5.0;
  std::size_t points = 201;
  std::string grid = "uniform", method = "reduced";
  auto* pdf = app.add_subcommand("pdf", "Tabulate the ratio density");
  pdf->add_option("--beta", beta, "Symmetry class (1 or 2)")->required()->check(CLI::IsMember({1, 2}));
  pdf->add_option("--k", k, "Coupling in [0, 1]")->required();
  pdf->add_option("--r-min", r_min, "Smallest r");
  pdf->add_option("--r-max", r_max, "Largest r");
  pdf->add_option("--points", points, "Number of grid points");
  pdf->add_option("--grid", grid, "uniform or log");
  pdf->add_option("--method", method, "beta=1 evaluator: reduced or triple");
  pdf->add_option("--format", format, "csv or json");
  pdf->add_option("--out", out_path, "Output path (default stdout)");

  std::string input;
  std::size_t bootstrap = 200;
  std::string fit_method = "mle";
  auto* fit = app.add_subcommand("fit", "Estimate k from a ratios file");
  fit->add_option("input", input, "Ratios file")->required();
  fit->add_option("--beta", beta, "Symmetry class (1 or 2)")->required()->check(CLI::IsMember({1, 2}));
  fit->add_option("--method", fit_method, "mle or histogram");
  fit->add_option("--seed", seed, "Bootstrap seed");
  fit->add_option("--bootstrap", bootstrap, "Bootstrap resamples");
  fit->add_option("--threads", threads, "Worker threads for the bootstrap");
  std::string fit_format = "json";
  fit->add_option("--format", fit_format, "json or csv");
  fit->add_option("--out", out_path, "Output path (default stdout)");

  std::optional<double> threshold;
  std::string mode = "all-adjacent";
  bool generic_only = false;
  auto* ingest = app.add_subcommand("ingest", "Extract spacing ratios from a level file");
  ingest->add_option("levels", input, "Level file")->required();
  ingest->add_option("--entropy-threshold", threshold, "Tag levels with entropy <= threshold as localized");
  ingest->add_option("--mode", mode, "centered or all-adjacent");
  ingest->add_flag("--generic-only", generic_only, "Emit ratios of triples without localized levels");
  ingest->add_option("--format", format, "csv (ratios file) or json");
  ingest->add_option("--out", out_path, "Output path (default stdout)");

  std::string suite = "quick", fixtures = env.default_fixtures, fixtures_out, report_format = "json";
  auto* validate = app.add_subcommand("validate", "Run oracle checks");
  validate->add_option("--suite", suite, "quick or full");
  validate->add_option("--fixtures", fixtures, "Oracle fixtures file");
  validate->add_option("--write-fixtures", fixtures_out, "Recompute oracle fixtures into this file and exit");
  validate->add_option("--format", report_format, "json or csv");
  validate->add_option("--out", out_path, "Output path (default stdout)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) {
      detail::require_format(format);
      if (!(k >= 0.0 && k * k < 2.0)) throw UsageError("--k must satisfy 0 <= k < sqrt(2)");
      const auto cls = symmetry_from_beta(beta);
      const auto sample = sample_ratios(cls, Coupling{k}, n, seed, threads);
      detail::Sink sink(out_path, out);
      if (format == "csv")
        write_ratio_file(sink.stream(), sample);
      else
        detail::write_ratios_json(sink.stream(), sample, {});
      err << "simulate: " << sample.size() << " ratios, " << sample.meta.n_discarded << " degenerate draws discarded"
          << (sample.meta.outside_fit_regime ? " (k > 1: outside the analytic range)" : "") << '\n';
      return kOk;
    }

    if (pdf->parsed()) {
      detail::require_format(format);
      detail::require_analytic_k(k);
      if (method != "reduced" && method != "triple") throw UsageError("--method must be reduced or triple");
      const auto cls = symmetry_from_beta(beta);
      const auto m = method == "triple" ? Beta1Method::Triple : Beta1Method::Reduced;
      const auto rs = detail::make_grid(r_min, r_max, points, grid);
      const QuadratureSpec quad{};
      const DispatchThresholds th{};
      std::vector<double> ps;
      for (double r : rs) {
        try {
          ps.push_back(ratio_pdf(cls, k, r, quad, th, m));
        } catch (const ConvergenceError& e) {
          err << "pdf: quadrature did not converge at r=" << format_real(r) << "; best estimate "
              << format_real(e.estimate()) << " (error bound " << format_real(e.error_bound()) << ")\n";
          return kFailure;
        }
      }
      const double norm = normalization_integral([&](double r) { return ratio_pdf(cls, k, r, quad, th); }, quad);
      HeaderFields prov{{"version", kVersion},
                        {"beta", std::to_string(beta)},
                        {"k", format_real(k)},
                        {"grid", grid},
                        {"method", cls == SymmetryClass::Orthogonal ? method : "closed-form"},
                        {"quadrature", quad.to_string()},
                        {"quadrature_hash", quad.hash()},
                        {"thresholds", "k_low=" + format_real(th.k_low) + ";k_high=" + format_real(th.k_high)}};
      detail::Sink sink(out_path, out);
      auto& os = sink.stream();
      if (format == "csv") {
        os << "# ratio-rmt pdf table v1\n";
        for (const auto& [key, value] : prov) os << "# " << key << ": " << value << '\n';
        os << "r,pdf\n";
        for (std::size_t i = 0; i < rs.size(); ++i) os << format_real(rs[i]) << ',' << format_real(ps[i]) << '\n';
        os << "# normalization: " << format_real(norm) << '\n';
      } else {
        json j{{"kind", "pdf_table"}};
        for (const auto& [key, value] : prov) j[key] = value;
        j["beta"] = beta;
        j["k"] = k;
        j["r"] = rs;
        j["pdf"] = ps;
        j["normalization"] = norm;
        os << j.dump(2) << '\n';
      }
      return kOk;
    }

    if (fit->parsed()) {
      detail::require_format(fit_format);
      if (fit_method != "mle" && fit_method != "histogram") throw UsageError("--method must be mle or histogram");
      std::ifstream in(input);
      if (!in) throw UsageError("cannot read ratios file " + input);
      const auto file = read_ratio_file(in);
      if (file.sample.empty()) throw UsageError("ratios file " + input + " contains no ratios");
      const auto cls = symmetry_from_beta(beta);
      FitOptions opts;
      opts.seed = seed;
      opts.bootstrap = bootstrap;
      opts.threads = threads;
      FitResult res;
      try {
        res = fit_method == "mle" ? fit_k_mle(file.sample.ratios, cls, opts) : fit_k_histogram(file.sample.ratios, cls, opts);
      } catch (const NonIdentifiableError& e) {
        detail::Sink sink(out_path, out);
        sink.stream() << json{{"kind", "fit_failure"},
                              {"version", kVersion},
                              {"reason", "non-identifiable"},
                              {"objective_spread", e.spread()},
                              {"n_used", file.sample.size()}}
                             .dump(2)
                      << '\n';
        err << "fit: " << e.what() << '\n';
        return kNonIdentifiable;
      }
      if (res.small_sample_warning)
        err << "fit: warning: only " << res.n_used << " ratios (fewer than " << kSmallSample << ")\n";
      detail::Sink sink(out_path, out);
      auto j = to_json(res);
      j["bootstrap_seed"] = seed;
      j["input"] = input;
      if (fit_format == "json") {
        sink.stream() << j.dump(2) << '\n';
      } else {
        sink.stream() << "key,value\n";
        for (const auto& [key, value] : j.items())
          sink.stream() << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
      }
      return kOk;
    }

    if (ingest->parsed()) {
      detail::require_format(format);
      ExtractOptions eo;
      if (mode == "centered")
        eo.mode = TripleSelectionMode::CenteredOnly;
      else if (mode == "all-adjacent")
        eo.mode = TripleSelectionMode::AllAdjacent;
      else
        throw UsageError("--mode must be centered or all-adjacent");
      eo.generic_only = generic_only;
      std::ifstream in(input);
      if (!in) throw UsageError("cannot read level file " + input);
      auto seq = parse_level_file(in);
      std::vector<std::string> warnings;
      if (threshold) {
        if (!seq.entropy) throw UsageError("--entropy-threshold given but the level file has no entropy column");
        seq = tag_localized(std::move(seq), *threshold, &warnings);
      } else if (!seq.localized) {
        throw UsageError("level file has no localized column; pass --entropy-threshold");
      }
      RatioSample sample;
      if (seq.localized_count() == 0 && !generic_only) {
        warnings.push_back("no localized levels; no ratios emitted");
        sample.meta.source = std::string("levels mode=") + to_string(eo.mode);
      } else {
        sample = extract_gl_ratios(seq, eo);
      }
      HeaderFields extra{{"mode", to_string(eo.mode)}, {"levels", std::to_string(seq.size())},
                         {"localized", std::to_string(seq.localized_count())},
                         {"localized_fraction", format_real(seq.localized_fraction())}};
      if (seq.entropy_threshold) extra.emplace_back("entropy_threshold", format_real(*seq.entropy_threshold));
      if (generic_only) extra.emplace_back("selection", "generic-only");
      detail::Sink sink(out_path, out);
      if (format == "csv")
        write_ratio_file(sink.stream(), sample, extra);
      else
        detail::write_ratios_json(sink.stream(), sample, extra);
      for (const auto& w : warnings) err << "ingest: warning: " << w << '\n';
      err << "ingest: " << sample.size() << " ratios, " << sample.meta.n_discarded << " degenerate triples discarded\n";
      return kOk;
    }

    if (validate->parsed()) {
      if (!fixtures_out.empty()) {
        const auto spec = oracle_spec();
        std::vector<FixtureRecord> recs;
        for (const auto& [b, kk, r] : standard_fixture_points()) recs.push_back(derive_fixture(b, kk, r, spec));
        std::ofstream fo(fixtures_out, std::ios::binary | std::ios::trunc);
        if (!fo) throw UsageError("cannot open " + fixtures_out);
        write_fixtures(fo, recs, spec);
        err << "validate: wrote " << recs.size() << " fixtures to " << fixtures_out << '\n';
        return kOk;
      }
      detail::require_format(report_format);
      if (suite != "quick" && suite != "full") throw UsageError("--suite must be quick or full");
      if (fixtures.empty()) throw UsageError("no fixtures file; pass --fixtures");
      std::vector<ValidationCheck> checks;
      std::vector<FixtureRecord> recs;
      {
        std::ifstream fi(fixtures);
        if (!fi) throw UsageError("cannot read fixtures file " + fixtures);
        try {
          recs = read_fixtures(fi);
        } catch (const DomainError& e) {
          checks.push_back({"fixtures_readable", 1.0, 0.0, false, e.what()});
        }
      }
      auto more = run_validation(suite == "full" ? Suite::Full : Suite::Quick, recs);
      checks.insert(checks.end(), more.begin(), more.end());
      const bool ok = all_passed(checks);
      detail::Sink sink(out_path, out);
      if (report_format == "json") {
        json arr = json::array();
        for (const auto& c : checks)
          arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"note", c.note}});
        sink.stream() << json{{"kind", "validation_report"}, {"version", kVersion}, {"suite", suite},
                              {"fixtures", fixtures}, {"passed", ok}, {"checks", arr}}
                             .dump(2)
                      << '\n';
      } else {
        sink.stream() << "name,passed,value,tolerance\n";
        for (const auto& c : checks)
          sink.stream() << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_real(c.value) << ','
                        << format_real(c.tolerance) << '\n';
      }
      return ok ? kOk : kFailure;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << "; best estimate " << format_real(e.estimate()) << " (error bound "
        << format_real(e.error_bound()) << ")\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Environment& env = {}) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err, env);
}

}  // namespace ratio_rmt::cli
