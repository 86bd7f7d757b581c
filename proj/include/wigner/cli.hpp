#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/errors.hpp>
#include <wigner/experiments/config.hpp>
#include <wigner/experiments/figures.hpp>
#include <wigner/experiments/io.hpp>
#include <wigner/experiments/run.hpp>
#include <wigner/identity_suite.hpp>
#include <wigner/statistics.hpp>
#include <wigner/version.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace wigner::cli {

enum ExitCode : int { ok = 0, usage = 1, runtime = 2, verification_failed = 3 };

/// Input the user can fix: bad flag combinations, unreadable config files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string law = "gaussian";
  std::optional<double> mu;
  std::string n_text;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::optional<double> truncate;
  std::optional<double> d_const;
  std::size_t bins = 70;
  std::string out;
  std::size_t workers = 1;
};

namespace detail {

inline EntryLaw make_law(const CommonFlags& f) {
  if (f.law == "gaussian") {
    if (f.mu) throw UsageError("--mu is only valid with --law pareto");
    return EntryLaw::gaussian();
  }
  if (f.law == "pareto") {
    if (!f.mu) throw UsageError("--law pareto requires --mu");
    try {
      return EntryLaw::pareto(*f.mu);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("--law must be gaussian or pareto, got '" + f.law + "'");
}

inline std::optional<TruncationSpec> make_truncation(const CommonFlags& f) {
  if (!f.truncate) {
    if (f.d_const) throw UsageError("--d-const requires --truncate");
    return std::nullopt;
  }
  TruncationSpec t;
  t.level_exponent = *f.truncate;
  if (f.d_const) t.d_constant = *f.d_const;
  try {
    (void)t.cutoff(2);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return t;
}

inline std::size_t single_n(const CommonFlags& f, std::size_t fallback) {
  if (f.n_text.empty()) return fallback;
  std::vector<std::size_t> ns;
  try {
    ns = parse_n_values(f.n_text);
  } catch (const ConfigError& e) {
    throw UsageError(std::string("--n: ") + e.what());
  }
  if (ns.size() != 1) throw UsageError("this subcommand takes a single --n");
  if (ns.front() < 2) throw UsageError("--n must be at least 2");
  return ns.front();
}

inline void add_law_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--law", f.law, "Entry law: gaussian or pareto")->capture_default_str()->check(CLI::IsMember({"gaussian", "pareto"}));
  app->add_option("--mu", f.mu, "Pareto shape parameter (> 3), required with --law pareto");
}

inline void add_truncation_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--truncate", f.truncate, "Truncate entries at D n^a with this exponent a in (0, 1/2]");
  app->add_option("--d-const", f.d_const, "Truncation constant D (default 1)");
}

inline void add_seed_flag(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
}

/// Matrix selected by the flags: W, or its truncated and renormalized form.
inline SymmetricMatrix build_matrix(const CommonFlags& f, std::size_t n) {
  const auto law = make_law(f);
  const auto trunc = make_truncation(f);
  auto w = sample_wigner({n, law, f.seed});
  if (trunc) return truncate(w, *trunc, law).breve;
  return w;
}

inline void emit(const CommonFlags& f, const std::string& file, const std::string& text, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
  } else {
    const auto path = std::filesystem::path(f.out) / file;
    write_file(path, text);
    out << path.string() << "\n";
  }
}

}  // namespace detail

/// Entry point; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral statistics of Wigner random matrices", "wigner"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);
  app.fallthrough(false);

  CommonFlags f;
  std::string config_path, replay_path, kind_text, figure_text;

  auto* sample = app.add_subcommand("sample", "Print a sampled matrix as dense CSV rows");
  detail::add_law_flags(sample, f);
  sample->add_option("--n", f.n_text, "Dimension (default 8)");
  detail::add_seed_flag(sample, f);
  detail::add_truncation_flags(sample, f);
  sample->add_option("--out", f.out, "Write matrix.csv into this directory instead of stdout");

  auto* spectrum = app.add_subcommand("spectrum", "Print ascending eigenvalues, one per line");
  detail::add_law_flags(spectrum, f);
  spectrum->add_option("--n", f.n_text, "Dimension (default 100)");
  detail::add_seed_flag(spectrum, f);
  detail::add_truncation_flags(spectrum, f);
  spectrum->add_option("--out", f.out, "Write spectrum.csv into this directory instead of stdout");

  auto* stats = app.add_subcommand("stats", "Print delta_star,t_stat,zeta,v_stat for one sample");
  detail::add_law_flags(stats, f);
  stats->add_option("--n", f.n_text, "Dimension (default 1000)");
  detail::add_seed_flag(stats, f);
  detail::add_truncation_flags(stats, f);

  auto* verify = app.add_subcommand("verify", "Check the exact resolvent identities and inequalities");
  detail::add_law_flags(verify, f);
  verify->add_option("--n", f.n_text, "Dimension, 3..256 (default 32)");
  detail::add_seed_flag(verify, f);
  verify->add_option("--trials", f.trials, "Number of matrices")->capture_default_str()->check(CLI::PositiveNumber);

  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  auto* cfg_opt = experiment->add_option("--config", config_path, "Experiment config file");
  auto* replay_opt = experiment->add_option("--replay", replay_path, "Re-run a manifest.json and compare digests");
  auto* kind_opt = experiment->add_option("--kind", kind_text,
                                          "esd_histogram, kolmogorov_curve, edge_tw, delocalization, "
                                          "identity_suite or local_law_scan");
  auto* law_opt = experiment->add_option("--law", f.law, "Entry law: gaussian or pareto")->capture_default_str();
  auto* mu_opt = experiment->add_option("--mu", f.mu, "Pareto shape parameter (> 3)");
  auto* n_opt = experiment->add_option("--n", f.n_text, "Sizes: integer, list a,b,c or range a:b:step");
  auto* trials_opt = experiment->add_option("--trials", f.trials, "Trials per n")->capture_default_str();
  auto* seed_opt = experiment->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  auto* trunc_opt = experiment->add_option("--truncate", f.truncate, "Truncation exponent a in (0, 1/2]");
  auto* dconst_opt = experiment->add_option("--d-const", f.d_const, "Truncation constant D (default 1)");
  auto* bins_opt = experiment->add_option("--bins", f.bins, "Histogram bins")->capture_default_str();
  experiment->add_option("--out", f.out, "Output directory (overrides the config)");
  experiment->add_option("--workers", f.workers, "Worker threads, 0 = one per core")->capture_default_str();
  for (auto* o : {kind_opt, law_opt, mu_opt, n_opt, trials_opt, seed_opt, trunc_opt, dconst_opt, bins_opt}) {
    o->excludes(cfg_opt);
    o->excludes(replay_opt);
  }
  cfg_opt->excludes(replay_opt);

  auto* figure = app.add_subcommand("figure", "Reproduce one of the four figures as SVG plus CSV");
  figure->add_option("name", figure_text, "fig1, fig2, fig3 or fig4")->required();
  figure->add_option("--n", f.n_text, "Sizes (fig2: list or range; others: single n)");
  figure->add_option("--trials", f.trials, "Trials per panel (0 = figure default)");
  detail::add_seed_flag(figure, f);
  figure->add_option("--bins", f.bins, "Histogram bins (0 = figure default)");
  detail::add_truncation_flags(figure, f);
  figure->add_option("--out", f.out, "Output directory (default .)");
  figure->add_option("--workers", f.workers, "Worker threads, 0 = one per core")->capture_default_str();

  // Figure defaults are signalled by zero.
  bool figure_trials_given = false, figure_bins_given = false;

  try {
    app.parse(argc, argv);
    figure_trials_given = figure->count("--trials") > 0;
    figure_bins_given = figure->count("--bins") > 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? ExitCode::ok : ExitCode::usage;
  }

  try {
    if (*sample) {
      const std::size_t n = detail::single_n(f, 8);
      const auto w = detail::build_matrix(f, n);
      std::string text;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) text += (k ? "," : "") + csv_number(w(j, k));
        text += "\n";
      }
      detail::emit(f, "matrix.csv", text, out);
      return ExitCode::ok;
    }
    if (*spectrum) {
      const std::size_t n = detail::single_n(f, 100);
      const auto e = eigenvalues(detail::build_matrix(f, n));
      std::string text;
      for (double x : e) text += csv_number(x) + "\n";
      detail::emit(f, "spectrum.csv", text, out);
      return ExitCode::ok;
    }
    if (*stats) {
      const std::size_t n = detail::single_n(f, 1000);
      const auto s = decompose(detail::build_matrix(f, n));
      const auto sum = summarize(s);
      out << csv_number(sum.delta_star) << "," << csv_number(sum.t_stat) << "," << csv_number(sum.zeta) << ","
          << csv_number(sum.v_stat) << "\n";
      return ExitCode::ok;
    }
    if (*verify) {
      const std::size_t n = detail::single_n(f, 32);
      if (n < 3 || n > 256) throw UsageError("verify: --n must lie in 3..256");
      const auto law = detail::make_law(f);
      const auto grid = identity_grid(10);
      IdentityReport total;
      for (std::size_t t = 0; t < f.trials; ++t)
        total.merge(run_identity_suite(sample_wigner({n, law, derive_seed(f.seed, t, n)}), grid));
      struct Row {
        const char* name;
        double value;
        const char* bound;
        bool pass;
      };
      const Row rows[] = {
          {"schur recursion residual", total.schur, "<= 1e-8", total.schur <= 1e-8},
          {"trace-minor identity residual", total.trace_minor, "<= 1e-8", total.trace_minor <= 1e-8},
          {"lambda = T/b identity residual", total.lambda, "<= 1e-8", total.lambda <= 1e-8 && total.degenerate == 0},
          {"frobenius inequality slack", total.frobenius_slack, ">= -1e-12", total.frobenius_slack >= -1e-12},
          {"column inequality slack", total.column_slack, ">= -1e-12", total.column_slack >= -1e-12},
          {"square-trace inequality slack", total.square_trace_slack, ">= -1e-12", total.square_trace_slack >= -1e-12},
          {"window bound slack (Q_nj)", total.window_slack, ">= -1e-12", total.window_slack >= -1e-12},
      };
      bool all = true;
      out << std::left << std::setw(34) << "check" << std::setw(16) << "worst" << std::setw(12) << "bound"
          << "result\n";
      for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", r.value);
        out << std::left << std::setw(34) << r.name << std::setw(16) << buf << std::setw(12) << r.bound
            << (r.pass ? "PASS" : "FAIL") << "\n";
        all = all && r.pass;
      }
      out << "matrices: " << f.trials << ", n = " << n << ", points per matrix: " << grid.size() << "\n";
      return all ? ExitCode::ok : ExitCode::verification_failed;
    }
    if (*experiment) {
      if (!replay_path.empty()) {
        const std::filesystem::path manifest(replay_path);
        if (!std::filesystem::exists(manifest)) throw UsageError("manifest not found: '" + replay_path + "'");
        const auto dir = f.out.empty() ? manifest.parent_path() / "replay" : std::filesystem::path(f.out);
        const auto rr = replay(manifest, dir, f.workers);
        if (rr.reproduced()) {
          out << "replay reproduced all " << rr.run.digests.size() << " recorded outputs in " << dir.string() << "\n";
          return ExitCode::ok;
        }
        for (const auto& m : rr.mismatched) err << "digest mismatch: " << m << "\n";
        return ExitCode::verification_failed;
      }
      ExperimentConfig c;
      if (!config_path.empty()) {
        try {
          c = load_config(config_path);
        } catch (const IoError& e) {
          throw UsageError(e.what());
        }
      } else {
        if (kind_text.empty()) throw UsageError("experiment needs --config, --replay or --kind");
        if (f.n_text.empty()) throw UsageError("experiment needs --n");
        c.kind = parse_kind(kind_text);
        c.law = detail::make_law(f);
        c.n_values = parse_n_values(f.n_text);
        c.trials = f.trials;
        c.master_seed = f.seed;
        c.truncation = detail::make_truncation(f);
        c.bins = f.bins;
      }
      if (!f.out.empty()) c.output_dir = f.out;
      c.validate();
      const auto res = run(c, f.workers, true);
      std::size_t failed = 0;
      for (const auto& r : res.records) failed += r.ok() ? 0 : 1;
      out << "wrote " << res.records.size() << " records to " << (c.output_dir / "records.csv").string();
      if (failed) out << " (" << failed << " failed trials)";
      out << "\n";
      return ExitCode::ok;
    }
    if (*figure) {
      FigureOptions o;
      const auto kind = parse_figure(figure_text);
      if (!f.n_text.empty()) o.n_values = parse_n_values(f.n_text);
      o.trials = figure_trials_given ? f.trials : 0;
      o.bins = figure_bins_given ? f.bins : 0;
      o.seed = f.seed;
      o.workers = f.workers;
      if (auto t = detail::make_truncation(f)) o.truncation = *t;
      const auto data = compute_figure(kind, o);
      const auto files = emit_figure(data, f.out.empty() ? std::filesystem::path(".") : std::filesystem::path(f.out));
      out << files.svg.string() << "\n" << files.csv.string() << "\n";
      return ExitCode::ok;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::runtime;
  }
  return ExitCode::usage;
}

}  // namespace wigner::cli
