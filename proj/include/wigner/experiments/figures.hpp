#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/experiments/config.hpp>
#include <wigner/experiments/histogram.hpp>
#include <wigner/experiments/io.hpp>
#include <wigner/experiments/parallel.hpp>
#include <wigner/experiments/seed.hpp>
#include <wigner/experiments/svg.hpp>
#include <wigner/semicircle.hpp>
#include <wigner/statistics.hpp>
#include <wigner/tracywidom.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace wigner {

enum class FigureKind { fig1, fig2, fig3, fig4 };

inline const char* figure_name(FigureKind k) {
  switch (k) {
    case FigureKind::fig1: return "fig1";
    case FigureKind::fig2: return "fig2";
    case FigureKind::fig3: return "fig3";
    case FigureKind::fig4: return "fig4";
  }
  return "?";
}

inline FigureKind parse_figure(const std::string& s) {
  for (auto k : {FigureKind::fig1, FigureKind::fig2, FigureKind::fig3, FigureKind::fig4})
    if (s == figure_name(k)) return k;
  throw ConfigError("unknown figure '" + s + "' (expected fig1, fig2, fig3 or fig4)");
}

/// Overrides for the figure defaults; zero or empty means "use the default".
///   fig1: n = 2000, 1 matrix per panel, 70 bins
///   fig2: n = 100:5000:100, 20 trials per n
///   fig3: n = 2000, 200 trials, 40 bins on [-6, 6]
///   fig4: n = 2000, 100 trials, 40 bins
struct FigureOptions {
  std::vector<std::size_t> n_values;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::size_t bins = 0;
  TruncationSpec truncation{};
  std::size_t workers = 1;
};

enum class Reference { none, semicircle, tracy_widom };

struct HistogramSeries {
  std::string label;
  EntryLaw law = EntryLaw::gaussian();
  bool truncated = false;
  std::size_t n = 0;
  std::vector<double> samples;
  Histogram hist;
  Reference reference = Reference::none;
  double ks = std::numeric_limits<double>::quiet_NaN();  // against the reference, when defined
};

struct CurveSeries {
  std::string label;
  EntryLaw law = EntryLaw::gaussian();
  std::vector<std::size_t> n;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::size_t> trials;
};

struct FigureData {
  FigureKind kind = FigureKind::fig1;
  std::vector<HistogramSeries> histograms;
  std::vector<CurveSeries> curves;
};

inline double reference_density(Reference r, double x) {
  switch (r) {
    case Reference::semicircle: return semicircle_density(x);
    case Reference::tracy_widom: return tw1_pdf(x);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

/// Largest |density - reference(center)| over the bins of a histogram.
inline double max_bin_deviation(const HistogramSeries& s) {
  double m = 0.0;
  for (std::size_t b = 0; b < s.hist.bins(); ++b)
    m = std::max(m, std::abs(s.hist.densities[b] - reference_density(s.reference, s.hist.center(b))));
  return m;
}

namespace detail {

inline std::uint64_t panel_seed(std::uint64_t seed, std::size_t panel) { return derive_seed(seed, panel, 0); }

inline std::size_t single_n(const FigureOptions& o, const char* fig) {
  if (o.n_values.empty()) return 2000;
  if (o.n_values.size() != 1) throw ConfigError(std::string(fig) + " takes a single n");
  if (o.n_values.front() < 2) throw ConfigError("n must be at least 2");
  return o.n_values.front();
}

inline std::string law_label(const EntryLaw& law) {
  return law.is_pareto() ? "mu = " + law.format_mu() : "gaussian";
}

}  // namespace detail

/// Runs the simulations behind one figure.
inline FigureData compute_figure(FigureKind kind, const FigureOptions& o) {
  FigureData fd;
  fd.kind = kind;
  (void)o.truncation.cutoff(2);
  switch (kind) {
    case FigureKind::fig1: {
      const std::size_t n = detail::single_n(o, "fig1");
      const std::size_t trials = o.trials ? o.trials : 1;
      const std::size_t bins = o.bins ? o.bins : 70;
      const std::vector<double> mus = {3.1, 4.1, 5.1, 9.1};
      for (std::size_t p = 0; p < mus.size(); ++p) {
        const auto law = EntryLaw::pareto(mus[p]);
        const auto seed = detail::panel_seed(o.seed, p);
        auto spectra = parallel_slots<std::vector<double>>(trials, o.workers, [&](std::size_t t) {
          return eigenvalues(sample_wigner({n, law, derive_seed(seed, t, n)}));
        });
        HistogramSeries s;
        s.label = detail::law_label(law);
        s.law = law;
        s.n = n;
        s.reference = Reference::semicircle;
        for (auto& e : spectra) s.samples.insert(s.samples.end(), e.begin(), e.end());
        // Each matrix contributes over its own [lambda_1, lambda_n]; pooling
        // several matrices uses the pooled extremes.
        s.hist = emit_histogram(s.samples, bins, RangePolicy::sample());
        std::sort(s.samples.begin(), s.samples.end());
        s.ks = kolmogorov_distance(s.samples);
        fd.histograms.push_back(std::move(s));
      }
      break;
    }
    case FigureKind::fig2: {
      std::vector<std::size_t> ns = o.n_values;
      if (ns.empty())
        for (std::size_t n = 100; n <= 5000; n += 100) ns.push_back(n);
      for (auto n : ns)
        if (n < 2) throw ConfigError("n must be at least 2");
      const std::size_t trials = o.trials ? o.trials : 20;
      const std::vector<EntryLaw> laws = {EntryLaw::pareto(5.1), EntryLaw::pareto(7.1), EntryLaw::pareto(9.1),
                                          EntryLaw::gaussian()};
      for (std::size_t p = 0; p < laws.size(); ++p) {
        const auto seed = detail::panel_seed(o.seed, p);
        const std::size_t jobs = ns.size() * trials;
        auto t_values = parallel_slots<double>(jobs, o.workers, [&](std::size_t i) {
          const std::size_t n = ns[i / trials], t = i % trials;
          const auto e = eigenvalues(sample_wigner({n, laws[p], derive_seed(seed, t, n)}));
          return t_statistic(kolmogorov_distance(e), n);
        });
        CurveSeries c;
        c.label = detail::law_label(laws[p]);
        c.law = laws[p];
        for (std::size_t k = 0; k < ns.size(); ++k) {
          long double sum = 0, sq = 0;
          for (std::size_t t = 0; t < trials; ++t) sum += t_values[k * trials + t];
          const double mean = static_cast<double>(sum / trials);
          for (std::size_t t = 0; t < trials; ++t) {
            const double d = t_values[k * trials + t] - mean;
            sq += d * d;
          }
          c.n.push_back(ns[k]);
          c.mean.push_back(mean);
          c.sd.push_back(trials > 1 ? static_cast<double>(std::sqrt(sq / (trials - 1))) : 0.0);
          c.trials.push_back(trials);
        }
        fd.curves.push_back(std::move(c));
      }
      break;
    }
    case FigureKind::fig3: {
      const std::size_t n = detail::single_n(o, "fig3");
      const std::size_t trials = o.trials ? o.trials : 200;
      const std::size_t bins = o.bins ? o.bins : 40;
      const std::vector<double> mus = {5.1, 6.1, 7.1, 9.1};
      const auto tw = tw1_gamma_params();
      // Left column untruncated, right column truncated, one row per mu.
      for (std::size_t p = 0; p < mus.size(); ++p) {
        const auto law = EntryLaw::pareto(mus[p]);
        const auto seed = detail::panel_seed(o.seed, p);
        struct Pair {
          double raw, truncated;
        };
        auto z = parallel_slots<Pair>(trials, o.workers, [&](std::size_t t) {
          const auto w = sample_wigner({n, law, derive_seed(seed, t, n)});
          const auto raw = eigenvalues(w);
          const auto br = eigenvalues(truncate(w, o.truncation, law).breve);
          return Pair{zeta_statistic(raw.back(), n), zeta_statistic(br.back(), n)};
        });
        for (int tr = 0; tr < 2; ++tr) {
          HistogramSeries s;
          s.label = detail::law_label(law) + (tr ? ", truncated" : "");
          s.law = law;
          s.truncated = tr == 1;
          s.n = n;
          s.reference = Reference::tracy_widom;
          for (const auto& v : z) s.samples.push_back(tr ? v.truncated : v.raw);
          s.hist = emit_histogram(s.samples, bins, RangePolicy::range(-6.0, 6.0));
          s.ks = ks_distance(s.samples, [&](double x) { return tw.cdf(x); });
          fd.histograms.push_back(std::move(s));
        }
      }
      break;
    }
    case FigureKind::fig4: {
      const std::size_t n = detail::single_n(o, "fig4");
      const std::size_t trials = o.trials ? o.trials : 100;
      const std::size_t bins = o.bins ? o.bins : 40;
      const std::vector<EntryLaw> laws = {EntryLaw::pareto(5.1), EntryLaw::pareto(9.1), EntryLaw::gaussian()};
      struct Pair {
        double raw, truncated;
      };
      std::vector<std::vector<Pair>> v(laws.size());
      for (std::size_t p = 0; p < laws.size(); ++p) {
        const auto seed = detail::panel_seed(o.seed, p);
        const bool with_truncation = laws[p].is_pareto();
        v[p] = parallel_slots<Pair>(trials, o.workers, [&](std::size_t t) {
          const auto w = sample_wigner({n, laws[p], derive_seed(seed, t, n)});
          const double raw = delocalization_stat(decompose(w));
          const double br = with_truncation ? delocalization_stat(decompose(truncate(w, o.truncation, laws[p]).breve))
                                            : std::numeric_limits<double>::quiet_NaN();
          return Pair{raw, br};
        });
      }
      auto series = [&](std::size_t p, bool truncated) {
        HistogramSeries s;
        s.label = "V_n, " + detail::law_label(laws[p]) + (truncated ? ", truncated" : "");
        s.law = laws[p];
        s.truncated = truncated;
        s.n = n;
        for (const auto& x : v[p]) s.samples.push_back(truncated ? x.truncated : x.raw);
        return s;
      };
      // Rows: (mu=5.1 raw, truncated), (mu=9.1 raw, truncated), (mu=9.1 truncated, gaussian).
      std::vector<HistogramSeries> panels = {series(0, false), series(0, true), series(1, false),
                                             series(1, true),  series(1, true), series(2, false)};
      for (std::size_t row = 0; row < 3; ++row) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t c = 0; c < 2; ++c)
          for (double x : panels[2 * row + c].samples) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
          }
        if (!(lo < hi)) {
          lo -= 0.5;
          hi += 0.5;
        }
        for (std::size_t c = 0; c < 2; ++c)
          panels[2 * row + c].hist = emit_histogram(panels[2 * row + c].samples, bins, RangePolicy::range(lo, hi));
      }
      fd.histograms = std::move(panels);
      break;
    }
  }
  return fd;
}

struct FigureFiles {
  std::filesystem::path svg;
  std::filesystem::path csv;
};

inline std::string figure_csv(const FigureData& fd) {
  std::ostringstream o;
  if (fd.kind == FigureKind::fig2) {
    o << "panel,law,mu,n,trials,mean_t_stat,sd_t_stat\n";
    for (std::size_t p = 0; p < fd.curves.size(); ++p) {
      const auto& c = fd.curves[p];
      for (std::size_t k = 0; k < c.n.size(); ++k)
        o << p << "," << (c.law.is_pareto() ? "pareto" : "gaussian") << ","
          << (c.law.is_pareto() ? csv_number(c.law.mu()) : "nan") << "," << c.n[k] << "," << c.trials[k] << ","
          << csv_number(c.mean[k]) << "," << csv_number(c.sd[k]) << "\n";
    }
    return o.str();
  }
  o << "panel,law,mu,truncated,n,samples,bin,left,right,center,count,density,reference,below,above,ks\n";
  for (std::size_t p = 0; p < fd.histograms.size(); ++p) {
    const auto& s = fd.histograms[p];
    for (std::size_t b = 0; b < s.hist.bins(); ++b)
      o << p << "," << (s.law.is_pareto() ? "pareto" : "gaussian") << ","
        << (s.law.is_pareto() ? csv_number(s.law.mu()) : "nan") << "," << (s.truncated ? 1 : 0) << "," << s.n << ","
        << s.samples.size() << "," << b << "," << csv_number(s.hist.edges[b]) << ","
        << csv_number(s.hist.edges[b + 1]) << "," << csv_number(s.hist.center(b)) << "," << s.hist.counts[b] << ","
        << csv_number(s.hist.densities[b]) << "," << csv_number(reference_density(s.reference, s.hist.center(b)))
        << "," << s.hist.below << "," << s.hist.above << "," << csv_number(s.ks) << "\n";
  }
  return o.str();
}

inline std::string figure_svg(const FigureData& fd) {
  constexpr double pw = 360, ph = 220, left = 70, top = 50, gap_x = 90, gap_y = 80;
  const std::size_t panels = fd.kind == FigureKind::fig2 ? fd.curves.size() : fd.histograms.size();
  const std::size_t rows = (panels + 1) / 2;
  SvgDocument doc(left + 2 * pw + gap_x + 30, top + rows * (ph + gap_y));
  const char* titles[] = {"Empirical spectral density, n = ", "E T_n with +/- 1 sd", "Edge statistic zeta_n, n = ",
                          "Delocalization statistic V_n, n = "};
  const auto k = static_cast<int>(fd.kind);
  for (std::size_t p = 0; p < panels; ++p) {
    const double x = left + static_cast<double>(p % 2) * (pw + gap_x);
    const double y = top + static_cast<double>(p / 2) * (ph + gap_y);
    if (fd.kind == FigureKind::fig2) {
      const auto& c = fd.curves[p];
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < c.n.size(); ++i) {
        lo = std::min(lo, c.mean[i] - c.sd[i]);
        hi = std::max(hi, c.mean[i] + c.sd[i]);
      }
      const double pad = 0.1 * std::max(hi - lo, 1e-3);
      const double x0 = static_cast<double>(c.n.front()), x1 = static_cast<double>(c.n.back());
      auto panel = doc.panel(x, y, pw, ph, x0, x1 > x0 ? x1 : x0 + 1.0, std::min(0.0, lo - pad), hi + pad);
      panel.axes(std::string(titles[k]) + ", " + detail::law_label(c.law), "n", "T_n");
      std::vector<std::pair<double, double>> m, up, dn;
      for (std::size_t i = 0; i < c.n.size(); ++i) {
        const double xn = static_cast<double>(c.n[i]);
        m.emplace_back(xn, c.mean[i]);
        up.emplace_back(xn, c.mean[i] + c.sd[i]);
        dn.emplace_back(xn, c.mean[i] - c.sd[i]);
      }
      panel.polyline(up, "black", 1.0);
      panel.polyline(dn, "black", 1.0);
      panel.polyline(m, "red", 1.8);
      continue;
    }
    const auto& s = fd.histograms[p];
    double ymax = *std::max_element(s.hist.densities.begin(), s.hist.densities.end());
    if (s.reference != Reference::none)
      for (std::size_t i = 0; i <= 200; ++i) {
        const double xx = s.hist.edges.front() + (s.hist.edges.back() - s.hist.edges.front()) * i / 200.0;
        ymax = std::max(ymax, reference_density(s.reference, xx));
      }
    if (!(ymax > 0.0)) ymax = 1.0;
    auto panel = doc.panel(x, y, pw, ph, s.hist.edges.front(), s.hist.edges.back(), 0.0, 1.1 * ymax);
    panel.axes(std::string(titles[k]) + std::to_string(s.n) + ", " + s.label,
               fd.kind == FigureKind::fig1 ? "eigenvalue" : (fd.kind == FigureKind::fig3 ? "zeta_n" : "V_n"),
               "density");
    panel.bars(s.hist, s.truncated ? "#9ecae1" : "#c6dbef");
    if (s.reference != Reference::none) {
      const auto ref = s.reference;
      panel.curve([ref](double xx) { return reference_density(ref, xx); }, "red");
    }
    panel.note("samples: " + std::to_string(s.samples.size()));
    if (!std::isnan(s.ks)) panel.note("KS: " + detail::fmt(s.ks, 3), 1);
    if (s.hist.below + s.hist.above > 0)
      panel.note("outside range: " + std::to_string(s.hist.below + s.hist.above), 2);
  }
  return doc.str();
}

/// Writes <name>.svg and <name>.csv into out_dir. Validation happens before
/// any file is touched.
inline FigureFiles emit_figure(const FigureData& fd, const std::filesystem::path& out_dir) {
  const std::string name = figure_name(fd.kind);
  if (fd.kind == FigureKind::fig2) {
    if (fd.curves.empty()) throw PreconditionError(name + ": no curve series");
    for (const auto& c : fd.curves)
      if (c.n.empty()) throw PreconditionError(name + ": series '" + c.label + "' has no points");
  } else {
    if (fd.histograms.empty()) throw PreconditionError(name + ": no histogram series");
    for (const auto& s : fd.histograms)
      if (s.samples.empty() || s.hist.bins() == 0)
        throw PreconditionError(name + ": series '" + s.label + "' has no data");
  }
  const std::string svg = figure_svg(fd);
  const std::string csv = figure_csv(fd);
  FigureFiles f{out_dir / (name + ".svg"), out_dir / (name + ".csv")};
  write_file(f.svg, svg);
  write_file(f.csv, csv);
  return f;
}

}  // namespace wigner
