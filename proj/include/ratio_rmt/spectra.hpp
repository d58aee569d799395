#pragma once

// Level files from external solvers and extraction of spacing ratios around
// localized levels.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/numerics.hpp"

namespace ratio_rmt {

/// Malformed input; line is 1-based, 0 when the problem is not tied to a line.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DomainError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LevelSequence {
  std::vector<double> energies;
  std::optional<std::vector<double>> entropy;
  std::optional<std::vector<bool>> localized;
  /// Set when `localized` was derived from `entropy`.
  std::optional<double> entropy_threshold;

  std::size_t size() const { return energies.size(); }

  std::size_t localized_count() const {
    if (!localized) return 0;
    return static_cast<std::size_t>(std::count(localized->begin(), localized->end(), true));
  }

  double localized_fraction() const {
    return energies.empty() ? 0.0 : static_cast<double>(localized_count()) / static_cast<double>(energies.size());
  }

  bool operator==(const LevelSequence&) const = default;
};

enum class TripleSelectionMode { CenteredOnly, AllAdjacent };

inline const char* to_string(TripleSelectionMode m) {
  return m == TripleSelectionMode::CenteredOnly ? "centered" : "all-adjacent";
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline constexpr const char* kThresholdTag = "# entropy_threshold=";

}  // namespace detail

/// Reads "energy[,entropy][,localized]" records; '#' starts a comment line.
/// The result is sorted by energy. Energies equal to within 1e-12 relative
/// are rejected.
inline LevelSequence parse_level_file(std::istream& in) {
  LevelSequence seq;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false, has_entropy = false, has_localized = false;
  std::vector<double> energy, entropy;
  std::vector<bool> flags;
  std::vector<std::size_t> source_line;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (t.rfind(detail::kThresholdTag, 0) == 0) {
        const auto v = detail::parse_real(detail::trim(t.substr(std::string(detail::kThresholdTag).size())));
        if (!v) throw ParseError("malformed entropy_threshold comment", lineno);
        seq.entropy_threshold = *v;
      }
      continue;
    }
    const auto cells = detail::split_commas(t);
    if (!have_header) {
      if (cells.empty() || cells[0] != "energy")
        throw ParseError("expected header \"energy[,entropy][,localized]\"", lineno);
      std::size_t i = 1;
      if (i < cells.size() && cells[i] == "entropy") {
        has_entropy = true;
        ++i;
      }
      if (i < cells.size() && cells[i] == "localized") {
        has_localized = true;
        ++i;
      }
      if (i != cells.size()) throw ParseError("unknown header column \"" + cells[i] + "\"", lineno);
      have_header = true;
      continue;
    }
    const std::size_t want = 1 + (has_entropy ? 1 : 0) + (has_localized ? 1 : 0);
    if (cells.size() != want)
      throw ParseError("expected " + std::to_string(want) + " fields, got " + std::to_string(cells.size()), lineno);
    const auto e = detail::parse_real(cells[0]);
    if (!e) throw ParseError("malformed energy \"" + cells[0] + "\"", lineno);
    energy.push_back(*e);
    std::size_t c = 1;
    if (has_entropy) {
      const auto s = detail::parse_real(cells[c]);
      if (!s || *s < 0.0) throw ParseError("malformed entropy \"" + cells[c] + "\"", lineno);
      entropy.push_back(*s);
      ++c;
    }
    if (has_localized) {
      if (cells[c] != "0" && cells[c] != "1") throw ParseError("localized must be 0 or 1", lineno);
      flags.push_back(cells[c] == "1");
    }
    source_line.push_back(lineno);
  }
  if (!have_header) throw ParseError("empty level file", 0);
  if (energy.empty()) throw ParseError("level file has no levels", 0);

  std::vector<std::size_t> order(energy.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energy[a] < energy[b]; });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double a = energy[order[i]], b = energy[order[i + 1]];
    if (std::fabs(b - a) <= 1e-12 * std::max(std::fabs(a), std::fabs(b))) {
      const std::size_t la = std::min(source_line[order[i]], source_line[order[i + 1]]);
      const std::size_t lb = std::max(source_line[order[i]], source_line[order[i + 1]]);
      throw ParseError("duplicate energy (also on line " + std::to_string(la) + ")", lb);
    }
  }
  for (std::size_t i : order) seq.energies.push_back(energy[i]);
  if (has_entropy) {
    seq.entropy.emplace();
    for (std::size_t i : order) seq.entropy->push_back(entropy[i]);
  }
  if (has_localized) {
    seq.localized.emplace();
    for (std::size_t i : order) seq.localized->push_back(flags[i]);
  }
  if (!has_entropy) seq.entropy_threshold.reset();
  return seq;
}

inline void write_level_file(std::ostream& os, const LevelSequence& seq) {
  if (seq.entropy_threshold) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *seq.entropy_threshold);
    os << detail::kThresholdTag << buf << '\n';
  }
  os << "energy" << (seq.entropy ? ",entropy" : "") << (seq.localized ? ",localized" : "") << '\n';
  char buf[64];
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", seq.energies[i]);
    os << buf;
    if (seq.entropy) {
      std::snprintf(buf, sizeof buf, "%.17g", (*seq.entropy)[i]);
      os << ',' << buf;
    }
    if (seq.localized) os << ',' << ((*seq.localized)[i] ? '1' : '0');
    os << '\n';
  }
}

/// localized_i = (S_i <= threshold). Appends a note to `warnings` when no
/// level qualifies.
inline LevelSequence tag_localized(LevelSequence seq, double threshold, std::vector<std::string>* warnings = nullptr) {
  if (!seq.entropy) throw DomainError("tag_localized: level sequence has no entropy column");
  if (!std::isfinite(threshold)) throw DomainError("tag_localized: threshold must be finite");
  seq.localized.emplace();
  for (double s : *seq.entropy) seq.localized->push_back(s <= threshold);
  seq.entropy_threshold = threshold;
  if (seq.localized_count() == 0 && warnings)
    warnings->push_back("no level has entropy <= threshold; zero localized levels");
  return seq;
}

struct ExtractOptions {
  TripleSelectionMode mode = TripleSelectionMode::AllAdjacent;
  /// Select triples with no localized member instead (g-g ratios).
  bool generic_only = false;
  /// Lower spacings below this fraction of the local mean spacing are discarded.
  double degeneracy_cutoff = 1e-10;
  std::size_t mean_window = 21;
};

/// Ratios r = (E_{k+1} - E_k) / (E_k - E_{k-1}) of the selected consecutive
/// triples. Each triple is emitted at most once; discards are counted in
/// meta.n_discarded.
inline RatioSample extract_gl_ratios(const LevelSequence& seq, const ExtractOptions& opts = {}) {
  if (seq.size() < 3) throw DomainError("extract_gl_ratios: need at least 3 levels");
  if (!seq.localized) throw DomainError("extract_gl_ratios: levels are not tagged (no localized flags)");
  const auto& e = seq.energies;
  const auto& loc = *seq.localized;
  const std::size_t n = e.size();
  RatioSample out;
  out.meta.source = std::string("levels mode=") + to_string(opts.mode) + (opts.generic_only ? " generic-only" : "");
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const bool any = loc[k - 1] || loc[k] || loc[k + 1];
    bool take;
    if (opts.generic_only)
      take = !any;
    else
      take = opts.mode == TripleSelectionMode::CenteredOnly ? static_cast<bool>(loc[k]) : any;
    if (!take) continue;
    // Window of w levels centred on k, shifted to stay inside the sequence.
    const std::size_t w = std::clamp<std::size_t>(opts.mean_window, 2, n);
    const std::size_t lo = std::min(k > w / 2 ? k - w / 2 : 0, n - w);
    const double mean_spacing = (e[lo + w - 1] - e[lo]) / static_cast<double>(w - 1);
    const double lower = e[k] - e[k - 1];
    if (!(lower > opts.degeneracy_cutoff * mean_spacing)) {
      ++out.meta.n_discarded;
      continue;
    }
    out.ratios.push_back((e[k + 1] - e[k]) / lower);
  }
  out.meta.n_requested = out.ratios.size() + out.meta.n_discarded;
  return out;
}

inline RatioSample extract_gl_ratios(const LevelSequence& seq, TripleSelectionMode mode) {
  ExtractOptions o;
  o.mode = mode;
  return extract_gl_ratios(seq, o);
}

}  // namespace ratio_rmt
