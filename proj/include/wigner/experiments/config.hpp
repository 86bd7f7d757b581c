#pragma once

#include <wigner/ensemble.hpp>
#include <wigner/errors.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wigner {

enum class ExperimentKind { esd_histogram, kolmogorov_curve, edge_tw, delocalization, identity_suite, local_law_scan };

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::esd_histogram: return "esd_histogram";
    case ExperimentKind::kolmogorov_curve: return "kolmogorov_curve";
    case ExperimentKind::edge_tw: return "edge_tw";
    case ExperimentKind::delocalization: return "delocalization";
    case ExperimentKind::identity_suite: return "identity_suite";
    case ExperimentKind::local_law_scan: return "local_law_scan";
  }
  return "?";
}

inline ExperimentKind parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::esd_histogram, ExperimentKind::kolmogorov_curve, ExperimentKind::edge_tw,
                 ExperimentKind::delocalization, ExperimentKind::identity_suite, ExperimentKind::local_law_scan})
    if (s == kind_name(k)) return k;
  throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kolmogorov_curve;
  EntryLaw law = EntryLaw::gaussian();
  std::vector<std::size_t> n_values;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::optional<TruncationSpec> truncation;
  std::size_t bins = 70;
  std::filesystem::path output_dir = "out";
  // Kind-specific knobs.
  std::vector<double> heights = {0.02, 0.05, 0.1, 0.5};  // local_law_scan
  std::size_t u_points = 401;                            // local_law_scan
  std::size_t z_points = 10;                             // identity_suite

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (n_values.empty()) throw ConfigError("at least one n is required");
    for (auto n : n_values)
      if (n < 2) throw ConfigError("every n must be at least 2, got " + std::to_string(n));
    if (bins < 2) throw ConfigError("bins must be at least 2");
    if (truncation) (void)truncation->cutoff(2);
    if (kind == ExperimentKind::local_law_scan) {
      if (heights.empty()) throw ConfigError("local_law_scan needs at least one height");
      for (double h : heights)
        if (!(h > 0.0)) throw ConfigError("heights must be positive");
      if (u_points < 2) throw ConfigError("u_points must be at least 2");
    }
    if (kind == ExperimentKind::identity_suite) {
      if (z_points < 1) throw ConfigError("z_points must be at least 1");
      for (auto n : n_values)
        if (n < 3 || n > 256)
          throw ConfigError("identity_suite needs 3 <= n <= 256 (one decomposition per minor), got " +
                            std::to_string(n));
    }
  }

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& s, const std::string& what) {
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError(what + ": cannot parse '" + s + "'");
  return value;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Sizes from "a:b:step" (inclusive), a comma list, or a single integer.
inline std::vector<std::size_t> parse_n_values(const std::string& text) {
  const std::string s = detail::trim(text);
  std::vector<std::size_t> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(detail::trim(p));
    if (parts.size() != 3) throw ConfigError("range must have the form a:b:step, got '" + s + "'");
    const auto a = detail::parse_number<std::size_t>(parts[0], "range start");
    const auto b = detail::parse_number<std::size_t>(parts[1], "range end");
    const auto step = detail::parse_number<std::size_t>(parts[2], "range step");
    if (step == 0) throw ConfigError("range step must be positive");
    if (a > b) throw ConfigError("range start exceeds end in '" + s + "'");
    for (std::size_t n = a; n <= b; n += step) out.push_back(n);
    return out;
  }
  for (const auto& item : detail::split_list(s)) out.push_back(detail::parse_number<std::size_t>(item, "n"));
  if (out.empty()) throw ConfigError("empty list of n values");
  return out;
}

/// Line-oriented "key = value" text with [experiment], [law] and
/// [truncation] sections; '#' starts a comment. See docs/config.md.
inline ExperimentConfig parse_config(std::string_view text) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"experiment", {"kind", "n", "trials", "seed", "bins", "output_dir", "heights", "u_points", "z_points"}},
      {"law", {"kind", "mu"}},
      {"truncation", {"exponent", "d_constant"}},
  };
  std::map<std::string, std::map<std::string, std::string>> values;
  std::set<std::string> sections_seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!allowed.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      if (!sections_seen.insert(section).second) throw ConfigError(where + "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!allowed.at(section).count(key)) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    if (!values[section].emplace(key, value).second) throw ConfigError(where + "duplicate key '" + key + "'");
  }

  ExperimentConfig c;
  auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
    auto s = values.find(sec);
    if (s == values.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  const auto* kind = get("experiment", "kind");
  if (!kind) throw ConfigError("[experiment] kind is required");
  c.kind = parse_kind(*kind);
  const auto* n = get("experiment", "n");
  if (!n) throw ConfigError("[experiment] n is required");
  c.n_values = parse_n_values(*n);
  if (auto* v = get("experiment", "trials")) c.trials = detail::parse_number<std::size_t>(*v, "trials");
  if (auto* v = get("experiment", "seed")) c.master_seed = detail::parse_number<std::uint64_t>(*v, "seed");
  if (auto* v = get("experiment", "bins")) c.bins = detail::parse_number<std::size_t>(*v, "bins");
  if (auto* v = get("experiment", "output_dir")) c.output_dir = *v;
  if (auto* v = get("experiment", "heights")) {
    c.heights.clear();
    for (const auto& item : detail::split_list(*v)) c.heights.push_back(detail::parse_number<double>(item, "heights"));
  }
  if (auto* v = get("experiment", "u_points")) c.u_points = detail::parse_number<std::size_t>(*v, "u_points");
  if (auto* v = get("experiment", "z_points")) c.z_points = detail::parse_number<std::size_t>(*v, "z_points");

  const auto* law = get("law", "kind");
  const auto* mu = get("law", "mu");
  if (!law || *law == "gaussian") {
    if (mu) throw ConfigError("[law] mu is only valid for kind = pareto");
    c.law = EntryLaw::gaussian();
  } else if (*law == "pareto") {
    if (!mu) throw ConfigError("[law] mu is required for kind = pareto");
    try {
      c.law = EntryLaw::pareto(detail::parse_number<double>(*mu, "mu"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown law '" + *law + "'");
  }

  if (sections_seen.count("truncation")) {
    TruncationSpec t;
    if (auto* v = get("truncation", "exponent")) t.level_exponent = detail::parse_number<double>(*v, "exponent");
    if (auto* v = get("truncation", "d_constant")) t.d_constant = detail::parse_number<double>(*v, "d_constant");
    c.truncation = t;
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; parse_config(to_config_text(c)) == c.
inline std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[experiment]\n";
  o << "kind = " << kind_name(c.kind) << "\n";
  o << "n = ";
  for (std::size_t i = 0; i < c.n_values.size(); ++i) o << (i ? ", " : "") << c.n_values[i];
  o << "\n";
  o << "trials = " << c.trials << "\n";
  o << "seed = " << c.master_seed << "\n";
  o << "bins = " << c.bins << "\n";
  o << "output_dir = " << c.output_dir.generic_string() << "\n";
  o << "heights = ";
  for (std::size_t i = 0; i < c.heights.size(); ++i) o << (i ? ", " : "") << detail::format_double(c.heights[i]);
  o << "\n";
  o << "u_points = " << c.u_points << "\n";
  o << "z_points = " << c.z_points << "\n";
  o << "\n[law]\n";
  if (c.law.is_pareto()) {
    o << "kind = pareto\nmu = " << detail::format_double(c.law.mu()) << "\n";
  } else {
    o << "kind = gaussian\n";
  }
  if (c.truncation) {
    o << "\n[truncation]\n";
    o << "exponent = " << detail::format_double(c.truncation->level_exponent) << "\n";
    o << "d_constant = " << detail::format_double(c.truncation->d_constant) << "\n";
  }
  return o.str();
}

}  // namespace wigner
