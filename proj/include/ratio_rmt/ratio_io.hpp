#pragma once

// Ratio files: a '#'-prefixed "key: value" header, then one ratio per line.

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ratio_rmt/ensemble.hpp"
#include "ratio_rmt/spectra.hpp"

namespace ratio_rmt {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kRatioFileTag = "# ratio-rmt ratios v1";

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// Header fields derived from the sample metadata, in a fixed order.
inline HeaderFields ratio_header(const RatioSample& s) {
  HeaderFields h;
  h.emplace_back("version", kVersion);
  if (s.meta.symmetry) h.emplace_back("beta", std::to_string(beta_of(*s.meta.symmetry)));
  if (s.meta.k) h.emplace_back("k", format_real(*s.meta.k));
  h.emplace_back("source", s.meta.source);
  if (s.meta.symmetry) h.emplace_back("seed", std::to_string(s.meta.seed));
  h.emplace_back("count", std::to_string(s.ratios.size()));
  h.emplace_back("discarded", std::to_string(s.meta.n_discarded));
  if (s.meta.outside_fit_regime) h.emplace_back("outside_fit_regime", "true");
  return h;
}

inline void write_ratio_file(std::ostream& os, const RatioSample& s, const HeaderFields& extra = {}) {
  os << kRatioFileTag << '\n';
  for (const auto& [key, value] : ratio_header(s)) os << "# " << key << ": " << value << '\n';
  for (const auto& [key, value] : extra) os << "# " << key << ": " << value << '\n';
  for (double r : s.ratios) os << format_real(r) << '\n';
}

struct RatioFile {
  RatioSample sample;
  std::map<std::string, std::string> header;
};

/// Parses a ratio file. Header lines are optional; "beta", "k", "seed" and
/// "discarded" populate the sample metadata when present.
inline RatioFile read_ratio_file(std::istream& in) {
  RatioFile f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto colon = t.find(':');
      if (colon != std::string::npos)
        f.header[detail::trim(t.substr(1, colon - 1))] = detail::trim(t.substr(colon + 1));
      continue;
    }
    const auto v = detail::parse_real(t);
    if (!v || *v < 0.0) throw ParseError("malformed ratio \"" + t + "\"", lineno);
    f.sample.ratios.push_back(*v);
  }
  auto& m = f.sample.meta;
  try {
    if (auto it = f.header.find("beta"); it != f.header.end()) m.symmetry = symmetry_from_beta(std::stoi(it->second));
    if (auto it = f.header.find("k"); it != f.header.end()) m.k = std::stod(it->second);
    if (auto it = f.header.find("seed"); it != f.header.end()) m.seed = std::stoull(it->second);
    if (auto it = f.header.find("discarded"); it != f.header.end()) m.n_discarded = std::stoull(it->second);
  } catch (const std::logic_error&) {
    throw ParseError("malformed ratio file header", 0);
  }
  if (auto it = f.header.find("source"); it != f.header.end()) m.source = it->second;
  m.n_requested = f.sample.ratios.size();
  return f;
}

}  // namespace ratio_rmt
