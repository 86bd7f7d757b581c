#include <wigner/experiments.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <regex>

#include <unistd.h>

using namespace wigner;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wigner_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesEverySectionAndRoundTrips) {
  const auto c = parse_config(R"(
# comment line
[experiment]
kind = edge_tw      # trailing comment
n = 100:300:100
trials = 7
seed = 18446744073709551615
bins = 40
output_dir = results/run1

[law]
kind = pareto
mu = 5.1

[truncation]
exponent = 0.3
)");
  EXPECT_EQ(c.kind, ExperimentKind::edge_tw);
  EXPECT_EQ(c.n_values, (std::vector<std::size_t>{100, 200, 300}));
  EXPECT_EQ(c.trials, 7u);
  EXPECT_EQ(c.master_seed, 18446744073709551615ULL);
  EXPECT_EQ(c.law, EntryLaw::pareto(5.1));
  ASSERT_TRUE(c.truncation.has_value());
  EXPECT_EQ(c.truncation->level_exponent, 0.3);
  EXPECT_EQ(c.truncation->d_constant, 1.0);
  EXPECT_EQ(parse_config(to_config_text(c)), c);

  ExperimentConfig g;
  g.kind = ExperimentKind::local_law_scan;
  g.n_values = {64, 128};
  g.heights = {0.1, 1.0 / 3.0};
  EXPECT_EQ(parse_config(to_config_text(g)), g);
}

TEST(Config, RejectsMalformedInput) {
  const std::string base = "[experiment]\nkind = edge_tw\nn = 10\n";
  EXPECT_NO_THROW(parse_config(base));
  EXPECT_THROW(parse_config(base + "colour = red\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "n = 20\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[mystery]\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[experiment]\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nkind = nope\nn = 10\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nkind = edge_tw\n"), ConfigError);
  EXPECT_THROW(parse_config("kind = edge_tw\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "trials = 0\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "trials = -3\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[law]\nkind = pareto\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[law]\nkind = pareto\nmu = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[law]\nkind = gaussian\nmu = 5\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "[truncation]\nexponent = 0.7\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nkind = identity_suite\nn = 512\n"), ConfigError);
  try {
    parse_config(base + "\n\ncolour = red\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config("/nonexistent/config.ini"), IoError);
}

TEST(Config, NValueGrammar) {
  EXPECT_EQ(parse_n_values("5"), (std::vector<std::size_t>{5}));
  EXPECT_EQ(parse_n_values("5, 7,9"), (std::vector<std::size_t>{5, 7, 9}));
  EXPECT_EQ(parse_n_values("100:5000:100").size(), 50u);
  EXPECT_THROW(parse_n_values("10:5:1"), ConfigError);
  EXPECT_THROW(parse_n_values("1:5:0"), ConfigError);
  EXPECT_THROW(parse_n_values("1:5"), ConfigError);
  EXPECT_THROW(parse_n_values("abc"), ConfigError);
}

TEST(Histogram, DensitiesIntegrateToOne) {
  RandomStream r(3);
  std::vector<double> x(5000);
  for (auto& v : x) v = r.normal();
  const auto h = emit_histogram(x, 70, RangePolicy::sample());
  double mass = 0;
  std::size_t total = 0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    mass += h.densities[b] * h.width(b);
    total += h.counts[b];
  }
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(total, x.size());
  EXPECT_EQ(h.edges.front(), *std::min_element(x.begin(), x.end()));
  EXPECT_EQ(h.edges.back(), *std::max_element(x.begin(), x.end()));
}

TEST(Histogram, FixedRangeCountsOutliersSeparately) {
  const std::vector<double> x = {-5, -1, -0.5, 0, 0.5, 1, 7};
  const auto h = emit_histogram(x, 4, RangePolicy::range(-1, 1));
  EXPECT_EQ(h.below, 1u);
  EXPECT_EQ(h.above, 1u);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 1, 2}));  // right edge lands in the last bin
  double mass = 0;
  for (std::size_t b = 0; b < 4; ++b) mass += h.densities[b] * h.width(b);
  EXPECT_NEAR(mass, 1.0, 1e-15);
  const auto flat = emit_histogram(std::vector<double>{2, 2, 2}, 3, RangePolicy::sample());
  EXPECT_EQ(flat.edges.front(), 1.5);
  EXPECT_EQ(flat.edges.back(), 2.5);
  EXPECT_THROW(emit_histogram(std::vector<double>{}, 3, RangePolicy::sample()), PreconditionError);
  EXPECT_THROW(emit_histogram(x, 3, RangePolicy::range(1, 1)), PreconditionError);
}

TEST(Io, Sha256KnownVectorsAndCsvNumbers) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(csv_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(csv_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(csv_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Parallel, SlotsAreIndependentOfWorkerCount) {
  auto fn = [](std::size_t i) { return derive_seed(9, i, 3) % 1000; };
  const auto one = parallel_slots<std::uint64_t>(50, 1, fn);
  const auto four = parallel_slots<std::uint64_t>(50, 4, fn);
  EXPECT_EQ(one, four);
  EXPECT_THROW(parallel_slots<int>(10, 3, [](std::size_t i) -> int {
                 if (i == 7) throw std::runtime_error("boom");
                 return 0;
               }),
               std::runtime_error);
}

TEST(Run, OutputsAreIdenticalForAnyWorkerCount) {
  ExperimentConfig c;
  c.kind = ExperimentKind::delocalization;
  c.law = EntryLaw::pareto(9.1);
  c.n_values = {40, 60};
  c.trials = 6;
  c.master_seed = 5;
  c.truncation = TruncationSpec{};
  const auto a = run(c, 1, false), b = run(c, 3, false);
  EXPECT_EQ(a.digests, b.digests);
  ASSERT_EQ(a.records.size(), 12u);
  for (const auto& r : a.records) {
    EXPECT_TRUE(r.ok()) << r.status;
    EXPECT_EQ(r.seed_used, derive_seed(5, r.trial_index, r.n));
    EXPECT_FALSE(std::isnan(r.v_stat));
    EXPECT_FALSE(std::isnan(r.v_stat_truncated));
    EXPECT_FALSE(std::isnan(r.zeta_truncated));
  }
  EXPECT_EQ(a.manifest["seed_collisions"], 0);
}

TEST(Run, ManifestReplayReproducesDigests) {
  const auto dir = scratch_dir("replay");
  ExperimentConfig c;
  c.kind = ExperimentKind::esd_histogram;
  c.n_values = {30, 50};
  c.trials = 3;
  c.master_seed = 77;
  c.bins = 12;
  c.output_dir = dir / "first";
  const auto res = run(c, 2, true);
  for (const char* f : {"records.csv", "summary.csv", "esd_histogram.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  EXPECT_EQ(sha256_file(c.output_dir / "records.csv"), res.digests.at("records.csv"));
  const auto m = nlohmann::json::parse(read_file(c.output_dir / "manifest.json"));
  EXPECT_EQ(m["config"]["kind"], "esd_histogram");
  EXPECT_EQ(m["seeds"].size(), 6u);
  EXPECT_EQ(m["seeds"][0]["seed"], std::to_string(derive_seed(77, 0, 30)));

  const auto rr = replay(c.output_dir / "manifest.json", dir / "second", 1);
  EXPECT_TRUE(rr.reproduced());
  EXPECT_EQ(read_file(dir / "second" / "records.csv"), read_file(c.output_dir / "records.csv"));

  // A tampered digest is reported.
  auto bad = m;
  bad["outputs"]["summary.csv"] = "00";
  write_file(dir / "bad.json", bad.dump());
  const auto br = replay(dir / "bad.json", dir / "third", 1);
  EXPECT_EQ(br.mismatched, std::vector<std::string>{"summary.csv"});
  write_file(dir / "broken.json", "{not json");
  EXPECT_THROW(replay(dir / "broken.json", dir / "x", 1), ConfigError);
  fs::remove_all(dir);
}

TEST(Run, KindSpecificTables) {
  ExperimentConfig c;
  c.n_values = {12};
  c.trials = 2;
  c.kind = ExperimentKind::identity_suite;
  c.z_points = 3;
  auto r = run(c, 1, false);
  EXPECT_EQ(std::count(r.extra_csv.begin(), r.extra_csv.end(), '\n'), 3);
  for (const auto& rec : r.records) EXPECT_TRUE(rec.ok()) << rec.status;
  c.kind = ExperimentKind::local_law_scan;
  c.heights = {0.1, 0.5};
  c.u_points = 11;
  r = run(c, 1, false);
  EXPECT_EQ(std::count(r.extra_csv.begin(), r.extra_csv.end(), '\n'), 1 + 2 * 2);
  c.kind = ExperimentKind::kolmogorov_curve;
  r = run(c, 1, false);
  EXPECT_TRUE(r.extra_csv.empty());
  EXPECT_EQ(r.digests.size(), 2u);
}

TEST(Run, FailedTrialsAreRecordedNotFatal) {
  // run() validates n up front; calling run_trial directly reaches the sampler's own check.
  ExperimentConfig c;
  c.kind = ExperimentKind::edge_tw;
  const auto out = run_trial(c, 1, 4);
  EXPECT_FALSE(out.record.ok());
  EXPECT_EQ(out.record.status.rfind("error: ", 0), 0u) << out.record.status;
  EXPECT_EQ(out.record.status.find(','), std::string::npos);
  EXPECT_EQ(out.record.seed_used, derive_seed(0, 4, 1));
  EXPECT_TRUE(std::isnan(out.record.zeta));
  const std::string row = out.record.csv_row();
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 12);
}

TEST(LocalLaw, SupDeviationShrinksWithN) {
  const double small = local_law_sup(eigenvalues(sample_wigner({100, EntryLaw::gaussian(), 1})), 0.5, 201).sup_abs;
  const double large = local_law_sup(eigenvalues(sample_wigner({800, EntryLaw::gaussian(), 1})), 0.5, 201).sup_abs;
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.05);
}

TEST(Svg, DocumentIsWellFormed) {
  FigureOptions o;
  o.n_values = {60};
  o.trials = 2;
  o.bins = 10;
  for (auto kind : {FigureKind::fig1, FigureKind::fig3, FigureKind::fig4}) {
    const auto fd = compute_figure(kind, o);
    const std::string svg = figure_svg(fd);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
    EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
    // Every opened element is closed or self-closing.
    const std::regex open("<(rect|line|polyline|text|svg)\\b");
    const std::regex close("</(text|svg)>|/>");
    const auto opened = std::distance(std::sregex_iterator(svg.begin(), svg.end(), open), std::sregex_iterator());
    const auto closed = std::distance(std::sregex_iterator(svg.begin(), svg.end(), close), std::sregex_iterator());
    EXPECT_EQ(opened, closed) << figure_name(kind);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
  }
  EXPECT_EQ(detail::xml_escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
}

TEST(Figures, LayoutsAndCsvRows) {
  FigureOptions o;
  o.n_values = {50};
  o.trials = 2;
  const auto f1 = compute_figure(FigureKind::fig1, o);
  ASSERT_EQ(f1.histograms.size(), 4u);
  const auto csv = figure_csv(f1);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 70);
  for (const auto& h : f1.histograms) {
    EXPECT_EQ(h.reference, Reference::semicircle);
    EXPECT_EQ(h.samples.size(), 100u);
  }
  const auto f3 = compute_figure(FigureKind::fig3, o);
  EXPECT_EQ(f3.histograms.size(), 8u);
  for (const auto& h : f3.histograms) EXPECT_EQ(h.reference, Reference::tracy_widom);
  FigureOptions c2;
  c2.n_values = {20, 40};
  c2.trials = 3;
  const auto f2 = compute_figure(FigureKind::fig2, c2);
  EXPECT_EQ(f2.curves.size(), 4u);
  for (const auto& c : f2.curves) EXPECT_EQ(c.n, (std::vector<std::size_t>{20, 40}));
  EXPECT_THROW(parse_figure("fig9"), ConfigError);
  FigureOptions multi;
  multi.n_values = {20, 40};
  EXPECT_THROW(compute_figure(FigureKind::fig1, multi), ConfigError);

  const auto dir = scratch_dir("fig");
  const auto files = emit_figure(f1, dir);
  EXPECT_TRUE(fs::exists(files.svg));
  EXPECT_EQ(read_file(files.csv), csv);
  fs::remove_all(dir);
}

TEST(Figures, SameSeedSameData) {
  FigureOptions o;
  o.n_values = {40};
  o.trials = 3;
  EXPECT_EQ(figure_csv(compute_figure(FigureKind::fig4, o)), figure_csv(compute_figure(FigureKind::fig4, o)));
  o.workers = 3;
  const auto threaded = figure_csv(compute_figure(FigureKind::fig4, o));
  o.workers = 1;
  EXPECT_EQ(threaded, figure_csv(compute_figure(FigureKind::fig4, o)));
}
