#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbed/rbed.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string seeds;
  std::optional<std::int64_t> episodes;

  void apply(rbed::ExperimentConfig& cfg) const {
    if (!seeds.empty()) cfg.seeds = rbed::parse_seed_list(seeds);
    if (episodes) cfg.episodes = *episodes;
    rbed::validate(cfg);
  }
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  rbed::detail::write_file(path, j.dump(2) + "\n");
}

std::string opt_str(const std::optional<double>& v) {
  return v ? rbed::format_double(*v) : std::string("-");
}

void print_summary(const rbed::ScheduleSummary& s, std::int64_t budget) {
  std::cout << s.label << ": solved " << s.solve_count << "/" << s.runs.size() << " within " << budget
            << " episodes, mean solve episode " << opt_str(s.mean_solve_episode) << ", reached max reward in "
            << s.reached_max_count << " runs (mean first episode " << opt_str(s.mean_first_max_reward)
            << "), aggregate rolling mean reaches 195 at "
            << (s.aggregate_solved_at ? std::to_string(*s.aggregate_solved_at) : std::string("-")) << "\n";
}

std::string label_from(const fs::path& config_json, const std::string& fallback) {
  std::ifstream in(config_json);
  if (!in) return fallback;
  try {
    return rbed::config_from_json(nlohmann::json::parse(in)).display_label();
  } catch (const std::exception&) {
    return fallback;
  }
}

int cmd_run(const fs::path& config, const fs::path& out, const Overrides& ov, unsigned jobs) {
  auto cfg = rbed::load_config(config);
  ov.apply(cfg);
  const auto runs = rbed::run_experiment(cfg, jobs);
  rbed::emit_csv(runs, out);
  write_json(out / "config.json", rbed::config_to_json(cfg));
  std::cout << cfg.display_label() << ": solved " << rbed::solve_count(runs) << "/" << runs.size()
            << " within " << rbed::solve_budget << " episodes; wrote " << out.string() << "\n";
  return 0;
}

int cmd_compare(const fs::path& config_a, const fs::path& config_b, const fs::path& out, const Overrides& ov,
                unsigned jobs) {
  auto a = rbed::load_config(config_a);
  auto b = rbed::load_config(config_b);
  ov.apply(a);
  ov.apply(b);
  const auto report = rbed::compare(a, b, jobs);

  rbed::emit_csv(report.a.runs, out / "a");
  rbed::emit_csv(report.b.runs, out / "b");
  write_json(out / "a" / "config.json", rbed::config_to_json(a));
  write_json(out / "b" / "config.json", rbed::config_to_json(b));
  write_json(out / "report.json", rbed::report_to_json(report));
  rbed::emit_svg(report, out);

  print_summary(report.a, report.budget);
  print_summary(report.b, report.budget);
  std::cout << "solve ratio (" << report.a.label << " / " << report.b.label << "): "
            << (report.solve_ratio ? rbed::format_double(*report.solve_ratio) : std::string("unbounded")) << "\n";
  return 0;
}

int cmd_plot(const fs::path& in, const fs::path& out) {
  std::vector<rbed::PlotSeries> series;
  if (fs::exists(in / rbed::aggregate_csv_name)) {
    series.push_back({label_from(in / "config.json", in.filename().string()),
                      rbed::read_aggregate_csv(in / rbed::aggregate_csv_name)});
  } else {
    for (const char* sub : {"a", "b"}) {
      const auto dir = in / sub;
      if (fs::exists(dir / rbed::aggregate_csv_name))
        series.push_back({label_from(dir / "config.json", sub), rbed::read_aggregate_csv(dir / rbed::aggregate_csv_name)});
    }
  }
  if (series.empty())
    throw std::runtime_error("plot: no aggregate.csv found in " + in.string() + " or its a/ and b/ subdirectories");
  for (const auto& p : rbed::emit_svg(series, out)) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-based vs exponential epsilon decay on CartPole-v0"};
  app.require_subcommand(1);

  Overrides ov;
  unsigned jobs = rbed::default_jobs();
  fs::path config, config_a, config_b, out, in;
  std::int64_t episodes = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seeds", ov.seeds, "Seed override, e.g. 1..20 or 3,5,8");
    sub->add_option("--episodes", episodes, "Episode count override")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", jobs, "Worker threads (default: available processors)")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "Run one configuration over all seeds and write CSVs");
  run->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->required();
  add_common(run);

  auto* cmp = app.add_subcommand("compare", "Run two configurations on the same seeds; write CSVs, SVGs, report");
  cmp->add_option("--config-a", config_a, "First JSON config")->required()->check(CLI::ExistingFile);
  cmp->add_option("--config-b", config_b, "Second JSON config")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", out, "Output directory")->required();
  add_common(cmp);

  auto* plot = app.add_subcommand("plot", "Draw SVG charts from a run or compare output directory");
  plot->add_option("--in", in, "Directory written by run or compare")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (episodes > 0) ov.episodes = episodes;

  try {
    if (run->parsed()) return cmd_run(config, out, ov, jobs);
    if (cmp->parsed()) return cmd_compare(config_a, config_b, out, ov, jobs);
    if (plot->parsed()) return cmd_plot(in, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
