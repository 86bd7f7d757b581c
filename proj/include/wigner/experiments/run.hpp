#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/experiments/config.hpp>
#include <wigner/experiments/histogram.hpp>
#include <wigner/experiments/io.hpp>
#include <wigner/experiments/parallel.hpp>
#include <wigner/experiments/seed.hpp>
#include <wigner/identity_suite.hpp>
#include <wigner/resolvent.hpp>
#include <wigner/semicircle.hpp>
#include <wigner/statistics.hpp>
#include <wigner/tracywidom.hpp>
#include <wigner/version.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace wigner {

struct TrialRecord {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t trial_index = 0;
  std::size_t n = 0;
  std::uint64_t seed_used = 0;
  double delta_star = nan;
  double t_stat = nan;
  double zeta = nan;
  double zeta_truncated = nan;
  double v_stat = nan;
  double v_stat_truncated = nan;
  double lambda_min = nan;
  double lambda_max = nan;
  double max_bulk_rigidity = nan;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }

  static std::string csv_header() {
    return "trial_index,n,seed_used,delta_star,t_stat,zeta,zeta_truncated,v_stat,v_stat_truncated,"
           "lambda_min,lambda_max,max_bulk_rigidity,status\n";
  }
  std::string csv_row() const {
    std::string r = std::to_string(trial_index) + "," + std::to_string(n) + "," + std::to_string(seed_used);
    for (double x : {delta_star, t_stat, zeta, zeta_truncated, v_stat, v_stat_truncated, lambda_min, lambda_max,
                     max_bulk_rigidity})
      r += "," + csv_number(x);
    return r + "," + status + "\n";
  }
};

/// Extra per-kind table written next to records.csv.
struct ExtraTable {
  std::string file;
  std::string header;
};

inline std::optional<ExtraTable> extra_table(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::esd_histogram:
      return ExtraTable{"esd_histogram.csv", "trial_index,n,bin,left,right,count,density,semicircle\n"};
    case ExperimentKind::local_law_scan:
      return ExtraTable{"local_law.csv", "trial_index,n,v,sup_abs_diff,argsup_u,scaled_by_nv\n"};
    case ExperimentKind::identity_suite:
      return ExtraTable{"identity.csv",
                        "trial_index,n,schur,trace_minor,lambda,frobenius_slack,column_slack,square_trace_slack,"
                        "window_slack,degenerate\n"};
    default:
      return std::nullopt;
  }
}

struct TrialOutput {
  TrialRecord record;
  std::string extra_rows;
};

struct LocalLawPoint {
  double sup_abs;
  double argsup_u;
};

/// sup over an equispaced u-grid on [-2, 2] of |m_n(u+iv) - s(u+iv)|.
inline LocalLawPoint local_law_sup(std::span<const double> eigenvalues, double v, std::size_t u_points) {
  LocalLawPoint best{0.0, -2.0};
  const double inv_n = 1.0 / static_cast<double>(eigenvalues.size());
  for (std::size_t i = 0; i < u_points; ++i) {
    const double u = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(u_points - 1);
    double re = 0.0, im = 0.0;
    for (double lam : eigenvalues) {
      const double d = lam - u;
      const double inv = 1.0 / (d * d + v * v);
      re += d * inv;
      im += inv;
    }
    const complex mn(re * inv_n, im * v * inv_n);
    const double diff = std::abs(mn - stieltjes_s(ComplexPoint(u, v)));
    if (diff > best.sup_abs) best = {diff, u};
  }
  return best;
}

namespace detail {

inline std::string sanitize_status(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ch == ',' ? ';' : ' ';
  return s;
}

inline bool kind_needs_vectors(ExperimentKind k) {
  return k == ExperimentKind::delocalization || k == ExperimentKind::identity_suite;
}

}  // namespace detail

/// One trial: sample, decompose, fill the record and the kind-specific rows.
inline TrialOutput run_trial(const ExperimentConfig& c, std::size_t n, std::size_t trial) {
  TrialOutput out;
  TrialRecord& r = out.record;
  r.trial_index = trial;
  r.n = n;
  r.seed_used = derive_seed(c.master_seed, trial, n);
  try {
    const SymmetricMatrix w = sample_wigner({n, c.law, r.seed_used});
    const bool vectors = detail::kind_needs_vectors(c.kind);
    const SpectralData s = vectors ? decompose(w) : decompose_values(w);
    const auto eig = s.eigenvalues();
    r.delta_star = kolmogorov_distance(eig);
    r.t_stat = t_statistic(r.delta_star, n);
    r.zeta = zeta_statistic(s.lambda_max(), n);
    r.lambda_min = s.lambda_min();
    r.lambda_max = s.lambda_max();
    r.max_bulk_rigidity = max_bulk_rigidity(rigidity_profile(eig, quantile_table(n)));
    if (vectors) r.v_stat = delocalization_stat(s);
    if (c.truncation) {
      const auto triple = truncate(w, *c.truncation, c.law);
      const SpectralData sb = vectors ? decompose(triple.breve) : decompose_values(triple.breve);
      r.zeta_truncated = zeta_statistic(sb.lambda_max(), n);
      if (vectors) r.v_stat_truncated = delocalization_stat(sb);
    }
    std::ostringstream extra;
    const std::string prefix = std::to_string(trial) + "," + std::to_string(n) + ",";
    switch (c.kind) {
      case ExperimentKind::esd_histogram: {
        const auto h = emit_histogram(eig, c.bins, RangePolicy::sample());
        for (std::size_t b = 0; b < h.bins(); ++b)
          extra << prefix << b << "," << csv_number(h.edges[b]) << "," << csv_number(h.edges[b + 1]) << ","
                << h.counts[b] << "," << csv_number(h.densities[b]) << ","
                << csv_number(semicircle_density(h.center(b))) << "\n";
        break;
      }
      case ExperimentKind::local_law_scan:
        for (double v : c.heights) {
          const auto p = local_law_sup(eig, v, c.u_points);
          extra << prefix << csv_number(v) << "," << csv_number(p.sup_abs) << "," << csv_number(p.argsup_u) << ","
                << csv_number(p.sup_abs * static_cast<double>(n) * v) << "\n";
        }
        break;
      case ExperimentKind::identity_suite: {
        const auto rep = run_identity_suite(w, identity_grid(c.z_points));
        extra << prefix << csv_number(rep.schur) << "," << csv_number(rep.trace_minor) << ","
              << csv_number(rep.lambda) << "," << csv_number(rep.frobenius_slack) << ","
              << csv_number(rep.column_slack) << "," << csv_number(rep.square_trace_slack) << ","
              << csv_number(rep.window_slack) << "," << rep.degenerate << "\n";
        break;
      }
      default:
        break;
    }
    out.extra_rows = extra.str();
  } catch (const std::exception& e) {
    const std::uint64_t seed = r.seed_used;
    r = TrialRecord{};
    r.trial_index = trial;
    r.n = n;
    r.seed_used = seed;
    r.status = "error: " + detail::sanitize_status(e.what());
    out.extra_rows.clear();
  }
  return out;
}

/// Per-n aggregates over successful trials.
inline std::string summary_csv(const std::vector<TrialRecord>& records) {
  std::map<std::size_t, std::vector<const TrialRecord*>> by_n;
  for (const auto& r : records) by_n[r.n].push_back(&r);
  std::ostringstream o;
  o << "n,trials_ok,trials_failed,mean_delta_star,mean_t_stat,sd_t_stat,mean_zeta,ks_zeta_tw1,"
       "ks_zeta_truncated_tw1,mean_v_stat,mean_v_stat_truncated\n";
  const auto tw = tw1_gamma_params();
  auto cdf = [&](double x) { return tw.cdf(x); };
  for (const auto& [n, rs] : by_n) {
    std::vector<double> t, d, z, zt, vs, vt;
    std::size_t failed = 0;
    for (const auto* r : rs) {
      if (!r->ok()) { ++failed; continue; }
      t.push_back(r->t_stat);
      d.push_back(r->delta_star);
      z.push_back(r->zeta);
      if (!std::isnan(r->zeta_truncated)) zt.push_back(r->zeta_truncated);
      if (!std::isnan(r->v_stat)) vs.push_back(r->v_stat);
      if (!std::isnan(r->v_stat_truncated)) vt.push_back(r->v_stat_truncated);
    }
    auto mean = [](const std::vector<double>& x) {
      if (x.empty()) return TrialRecord::nan;
      long double s = 0;
      for (double v : x) s += v;
      return static_cast<double>(s / x.size());
    };
    auto sd = [&](const std::vector<double>& x) {
      if (x.size() < 2) return TrialRecord::nan;
      const double m = mean(x);
      long double s = 0;
      for (double v : x) s += (v - m) * (v - m);
      return static_cast<double>(std::sqrt(s / (x.size() - 1)));
    };
    auto ks = [&](const std::vector<double>& x) { return x.empty() ? TrialRecord::nan : ks_distance(x, cdf); };
    o << n << "," << t.size() << "," << failed << "," << csv_number(mean(d)) << "," << csv_number(mean(t)) << ","
      << csv_number(sd(t)) << "," << csv_number(mean(z)) << "," << csv_number(ks(z)) << "," << csv_number(ks(zt))
      << "," << csv_number(mean(vs)) << "," << csv_number(mean(vt)) << "\n";
  }
  return o.str();
}

struct RunResult {
  std::vector<TrialRecord> records;
  std::string extra_csv;  // empty when the kind has no extra table
  nlohmann::ordered_json manifest;
  std::map<std::string, std::string> digests;  // file name -> sha256
};

/// Executes every (n, trial) pair on a bounded pool. Results are slotted by
/// job index, so the output never depends on scheduling. Writes records.csv,
/// summary.csv, the kind's extra table and manifest.json when write is set.
inline RunResult run(const ExperimentConfig& c, std::size_t workers = 1, bool write = true) {
  c.validate();
  struct Job {
    std::size_t n, trial;
  };
  std::vector<Job> jobs;
  auto sizes = c.n_values;
  std::stable_sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (auto n : sizes)
    for (std::size_t t = 0; t < c.trials; ++t) jobs.push_back({n, t});

  const auto started = std::chrono::steady_clock::now();
  std::vector<TrialOutput> outputs = parallel_slots<TrialOutput>(
      jobs.size(), workers, [&](std::size_t i) { return run_trial(c, jobs[i].n, jobs[i].trial); });
  const std::size_t pool = std::min(resolve_workers(workers), jobs.size());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  RunResult res;
  std::string records_csv = TrialRecord::csv_header();
  const auto extra = extra_table(c.kind);
  if (extra) res.extra_csv = extra->header;
  std::vector<std::uint64_t> seeds;
  for (auto& o : outputs) {
    records_csv += o.record.csv_row();
    if (extra) res.extra_csv += o.extra_rows;
    seeds.push_back(o.record.seed_used);
    res.records.push_back(std::move(o.record));
  }
  const std::string summary = summary_csv(res.records);

  std::map<std::string, std::string> files = {{"records.csv", records_csv}, {"summary.csv", summary}};
  if (extra) files[extra->file] = res.extra_csv;
  for (const auto& [name, bytes] : files) res.digests[name] = sha256_hex(bytes);

  auto& m = res.manifest;
  m["generator"] = "wigner-lab";
  m["version"] = version;
  m["config_text"] = to_config_text(c);
  m["config"] = {
      {"kind", kind_name(c.kind)},
      {"law", c.law.is_pareto() ? "pareto" : "gaussian"},
      {"mu", c.law.is_pareto() ? nlohmann::ordered_json(c.law.mu()) : nlohmann::ordered_json(nullptr)},
      {"n_values", c.n_values},
      {"trials", c.trials},
      {"master_seed", std::to_string(c.master_seed)},
      {"bins", c.bins},
      {"output_dir", c.output_dir.generic_string()},
  };
  if (c.truncation)
    m["config"]["truncation"] = {{"exponent", c.truncation->level_exponent},
                                 {"d_constant", c.truncation->d_constant}};
  else
    m["config"]["truncation"] = nullptr;
  m["workers"] = pool;
  auto& seed_list = m["seeds"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i)
    seed_list.push_back({{"n", jobs[i].n}, {"trial", jobs[i].trial}, {"seed", std::to_string(seeds[i])}});
  m["seed_collisions"] = count_seed_collisions(seeds);
  m["wall_clock_seconds"] = wall;
  m["outputs"] = res.digests;

  if (write) {
    for (const auto& [name, bytes] : files) write_file(c.output_dir / name, bytes);
    write_file(c.output_dir / "manifest.json", m.dump(2) + "\n");
  }
  return res;
}

struct ReplayResult {
  RunResult run;
  std::vector<std::string> mismatched;  // files whose digest differs from the manifest
  bool reproduced() const noexcept { return mismatched.empty(); }
};

/// Re-runs the configuration stored in a manifest into output_dir and
/// compares the digests of every recorded output.
inline ReplayResult replay(const std::filesystem::path& manifest_path, const std::filesystem::path& output_dir,
                           std::size_t workers = 1) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("config_text") || !m.contains("outputs"))
    throw ConfigError("manifest '" + manifest_path.string() + "' lacks config_text or outputs");
  ExperimentConfig c = parse_config(m["config_text"].get<std::string>());
  c.output_dir = output_dir;
  ReplayResult rr{run(c, workers, true), {}};
  for (const auto& [name, digest] : m["outputs"].items()) {
    auto it = rr.run.digests.find(name);
    if (it == rr.run.digests.end() || it->second != digest.get<std::string>()) rr.mismatched.push_back(name);
  }
  return rr;
}

}  // namespace wigner
