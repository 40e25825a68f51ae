#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include "rbed/csv.hpp"
#include "rbed/harness.hpp"
#include "rbed/svg.hpp"

namespace fs = std::filesystem;

namespace rbed {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class TempDir : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("rbed_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

ExperimentConfig small_config(SchedulerConfig s, std::int64_t episodes = 30) {
  ExperimentConfig cfg;
  cfg.scheduler = s;
  cfg.episodes = episodes;
  cfg.seeds = {1, 2, 3, 4};
  return cfg;
}

TEST(RunExperiment, Shape) {
  ExperimentConfig cfg;
  cfg.episodes = 1;
  cfg.seeds = {42};
  const auto runs = run_experiment(cfg);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].seed, 42u);
  ASSERT_EQ(runs[0].records.size(), 1u);
  EXPECT_EQ(runs[0].records[0].episode, 1);
  EXPECT_EQ(runs[0].records[0].epsilon, 1.0);
}

TEST(RunExperiment, EpsilonRecordedBeforeUpdate) {
  const auto cfg = small_config(RbedConfig{});
  for (const auto& run : run_experiment(cfg)) {
    SchedulerState s = rbed_init(195);
    for (const auto& rec : run.records) {
      ASSERT_EQ(rec.epsilon, current_epsilon(s));
      ASSERT_EQ(rec.total_reward, static_cast<double>(rec.steps));
      s = scheduler_update(s, rec.total_reward);
    }
  }
}

TEST(RunExperiment, SortedBySeedAndParallelEqualsSequential) {
  auto cfg = small_config(ExponentialConfig{});
  cfg.seeds = {9, 3, 7, 1, 5};
  const auto seq = run_experiment(cfg, 1);
  const auto par = run_experiment(cfg, 4);
  EXPECT_EQ(seq, par);
  for (std::size_t i = 1; i < seq.size(); ++i) EXPECT_LT(seq[i - 1].seed, seq[i].seed);
}

TEST(RunExperiment, MatchesSingleSeedRun) {
  const auto cfg = small_config(RbedConfig{});
  const auto runs = run_experiment(cfg, 3);
  EXPECT_EQ(runs[2], run_single(cfg, 3));
}

TEST(RunExperiment, RandomPolicyNeverSolves) {
  const auto cfg = small_config(ConstantConfig{1.0}, 500);
  for (const auto& r : run_experiment(cfg, 4)) EXPECT_FALSE(r.solved_at);
}

TEST(RunExperiment, ChainEnvironment) {
  auto cfg = small_config(ConstantConfig{0.2}, 200);
  cfg.environment = EnvironmentKind::chain;
  cfg.agent.params.gamma = 0.9;
  const auto runs = run_experiment(cfg, 2);
  for (const auto& r : runs) {
    ASSERT_EQ(r.records.size(), 200u);
    EXPECT_EQ(r.records.back().total_reward, 1.0);
  }
}

TEST(RunExperiment, RejectsInvalidConfig) {
  auto cfg = small_config(RbedConfig{});
  cfg.episodes = 0;
  EXPECT_THROW(run_experiment(cfg), config_error);
}

TEST(Compare, SelfComparison) {
  const auto cfg = small_config(RbedConfig{});
  const auto rep = compare(cfg, cfg, 2);
  EXPECT_EQ(rep.a.runs, rep.b.runs);
  EXPECT_EQ(rep.a.solve_count, rep.b.solve_count);
  EXPECT_EQ(rep.a.curves, rep.b.curves);
  EXPECT_EQ(rep.solve_ratio, 1.0);
}

TEST(Compare, RejectsMismatchedProtocol) {
  auto a = small_config(RbedConfig{});
  auto b = small_config(ExponentialConfig{});
  b.episodes = 31;
  EXPECT_THROW(compare(a, b), config_error);
  b = small_config(ExponentialConfig{});
  b.seeds = {1, 2, 3};
  EXPECT_THROW(compare(a, b), config_error);
  b = small_config(ExponentialConfig{});
  b.environment = EnvironmentKind::chain;
  EXPECT_THROW(compare(a, b), config_error);
}

TEST(Compare, SummaryStatistics) {
  std::vector<RunResult> runs(3);
  for (std::uint64_t i = 0; i < 3; ++i) {
    runs[i].seed = i + 1;
    for (std::int64_t e = 1; e <= 150; ++e)
      runs[i].records.push_back({e, e >= static_cast<std::int64_t>(10 * (i + 1)) ? 200.0 : 20.0, 0.1, 0});
    runs[i].solved_at = solved_at(runs[i].records);
  }
  runs[2].records.assign(150, EpisodeRecord{0, 50.0, 0.1, 50});
  runs[2].solved_at = std::nullopt;
  const auto s = summarize("x", runs, 500, 200.0);
  EXPECT_EQ(s.solve_count, 2u);
  EXPECT_EQ(s.reached_max_count, 2u);
  EXPECT_EQ(s.first_max_reward[0], 10);
  EXPECT_EQ(s.first_max_reward[1], 20);
  EXPECT_FALSE(s.first_max_reward[2]);
  EXPECT_DOUBLE_EQ(*s.mean_first_max_reward, 15.0);
  EXPECT_DOUBLE_EQ(*s.mean_solve_episode, (*runs[0].solved_at + *runs[1].solved_at) / 2.0);
}

TEST(SolveRatio, Cases) {
  EXPECT_EQ(solve_ratio(0, 0), 1.0);
  EXPECT_FALSE(solve_ratio(3, 0));
  EXPECT_EQ(solve_ratio(6, 2), 3.0);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(200.0), "200");
  EXPECT_EQ(format_double(1.0 - 1.0 / 195.0), "0.9948717948717949");
}

TEST_F(TempDir, EmitCsvLayout) {
  ExperimentConfig cfg;
  cfg.episodes = 3;
  cfg.seeds = {5};
  const auto runs = run_experiment(cfg);
  const auto files = emit_csv(runs, dir);
  ASSERT_EQ(files.size(), 2u);
  const auto run_text = slurp(dir / "run_seed5.csv");
  EXPECT_EQ(count_lines(run_text), 4u);
  EXPECT_EQ(run_text.substr(0, run_text.find('\n')), "episode,reward,epsilon,steps");
  EXPECT_EQ(run_text.find('\r'), std::string::npos);
  const auto agg_text = slurp(dir / "aggregate.csv");
  EXPECT_EQ(count_lines(agg_text), 4u);
  EXPECT_NE(agg_text.find("\n1,"), std::string::npos);
}

TEST_F(TempDir, AggregateRollingEmptyBeforeWindowAndReadBack) {
  ExperimentConfig cfg;
  cfg.episodes = 120;
  cfg.seeds = {1, 2};
  const auto runs = run_experiment(cfg, 2);
  emit_csv(runs, dir);
  std::ifstream in(dir / "aggregate.csv");
  std::string line;
  std::getline(in, line);
  for (int e = 1; e <= 120; ++e) {
    ASSERT_TRUE(std::getline(in, line));
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[2].empty(), e < 100) << "episode " << e;
  }
  EXPECT_EQ(read_aggregate_csv(dir / "aggregate.csv"), aggregate_runs(runs));
}

TEST_F(TempDir, ReEmissionIsByteIdentical) {
  ExperimentConfig cfg;
  cfg.episodes = 20;
  cfg.seeds = {1, 2, 3};
  const auto runs = run_experiment(cfg, 3);
  emit_csv(runs, dir / "one");
  emit_csv(run_experiment(cfg, 1), dir / "two");
  for (const char* f : {"run_seed1.csv", "run_seed2.csv", "run_seed3.csv", "aggregate.csv"})
    EXPECT_EQ(slurp(dir / "one" / f), slurp(dir / "two" / f)) << f;
}

TEST_F(TempDir, EmitCsvErrors) {
  EXPECT_THROW(emit_csv(std::vector<RunResult>{}, dir), std::invalid_argument);
  fs::create_directories(dir);
  std::ofstream(dir / "blocker") << "x";
  ExperimentConfig cfg;
  cfg.episodes = 2;
  cfg.seeds = {1};
  EXPECT_THROW(emit_csv(run_experiment(cfg), dir / "blocker" / "sub"), fs::filesystem_error);
}

TEST_F(TempDir, EmitSvgWellFormed) {
  const auto a = small_config(RbedConfig{}, 120);
  const auto b = small_config(ExponentialConfig{}, 120);
  const auto rep = compare(a, b, 4);
  const auto files = emit_svg(rep, dir);
  ASSERT_EQ(files.size(), 3u);
  for (const auto& f : files) {
    boost::property_tree::ptree tree;
    ASSERT_NO_THROW(boost::property_tree::read_xml(f.string(), tree)) << f;
    std::size_t polylines = 0;
    for (const auto& [name, child] : tree.get_child("svg"))
      if (name == "polyline") ++polylines;
    EXPECT_EQ(polylines, 2u) << f;
  }
  const auto rolling = slurp(dir / "rolling100.svg");
  EXPECT_NE(rolling.find("class=\"reference\""), std::string::npos);
  for (const auto& f : files) {
    const auto text = slurp(f);
    EXPECT_NE(text.find("class=\"x-label\""), std::string::npos);
    EXPECT_NE(text.find("class=\"y-label\""), std::string::npos);
  }
  // Deterministic output.
  emit_svg(rep, dir / "again");
  for (const char* f : {"reward.svg", "rolling100.svg", "epsilon.svg"})
    EXPECT_EQ(slurp(dir / f), slurp(dir / "again" / f));
}

std::vector<std::pair<double, double>> polyline_points(const std::string& svg_text, std::size_t which) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i <= which; ++i) pos = svg_text.find("<polyline", pos + 1);
  const auto start = svg_text.find("points=\"", pos) + 8;
  const auto end = svg_text.find('"', start);
  std::stringstream ss(svg_text.substr(start, end - start));
  std::vector<std::pair<double, double>> pts;
  std::string tok;
  while (ss >> tok) {
    const auto comma = tok.find(',');
    pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  return pts;
}

TEST_F(TempDir, ExponentialEpsilonPolylineDecreasesUntilFloor) {
  auto cfg = small_config(ExponentialConfig{1.0, 0.95, 0.05}, 150);
  cfg.seeds = {1};
  const auto runs = run_experiment(cfg);
  const std::vector<PlotSeries> series{{"exponential", aggregate_runs(runs)}};
  emit_svg(series, dir);
  const auto pts = polyline_points(slurp(dir / "epsilon.svg"), 0);
  ASSERT_EQ(pts.size(), 150u);
  // SVG y grows downward: decreasing epsilon means increasing y.
  std::size_t i = 1;
  for (; i < pts.size() && runs[0].records[i].epsilon > 0.05; ++i) ASSERT_GT(pts[i].second, pts[i - 1].second);
  ASSERT_LT(i, pts.size());
  for (++i; i < pts.size(); ++i) ASSERT_EQ(pts[i].second, pts[i - 1].second);
}

TEST_F(TempDir, EmitSvgRejectsEmpty) {
  EXPECT_THROW(emit_svg(std::vector<PlotSeries>{}, dir), std::invalid_argument);
  EXPECT_THROW(emit_svg(std::vector<PlotSeries>{{"x", AggregateCurves{}}}, dir), std::invalid_argument);
}

TEST(Svg, EscapesLabels) {
  svg::LineChart c;
  c.title = "a<b & \"c\"";
  c.series.push_back({"s", "#000", {{1, 1}, {2, 2}}});
  const auto text = svg::render(c);
  EXPECT_NE(text.find("a&lt;b &amp; &quot;c&quot;"), std::string::npos);
}

TEST(ReportJson, Fields) {
  const auto cfg = small_config(RbedConfig{}, 20);
  const auto j = report_to_json(compare(cfg, cfg));
  EXPECT_EQ(j.at("solve_ratio"), 1.0);
  EXPECT_EQ(j.at("a").at("runs").size(), 4u);
  EXPECT_TRUE(j.at("a").at("aggregate_solved_at").is_null());
}

}  // namespace
}  // namespace rbed
