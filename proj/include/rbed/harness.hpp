#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rbed/agent.hpp"
#include "rbed/config.hpp"
#include "rbed/env.hpp"
#include "rbed/episode.hpp"
#include "rbed/metrics.hpp"
#include "rbed/rng.hpp"
#include "rbed/schedule.hpp"

namespace rbed {

namespace detail {

template <Environment Env, class Indexer>
RunResult run_seed(const Env& env, const Indexer& encode, std::size_t n_states, const ExperimentConfig& cfg,
                   std::uint64_t seed) {
  Rng rng = seed_rng(seed);
  QTable q(n_states);
  SchedulerState schedule = make_scheduler(cfg.scheduler);

  RunResult run;
  run.seed = seed;
  run.records.reserve(static_cast<std::size_t>(cfg.episodes));
  for (std::int64_t e = 1; e <= cfg.episodes; ++e) {
    EpisodeRecord rec = run_episode(env, encode, q, current_epsilon(schedule), cfg.agent.params, rng);
    rec.episode = e;
    schedule = scheduler_update(schedule, rec.total_reward);
    run.records.push_back(rec);
  }
  run.solved_at = solved_at(run.records);
  return run;
}

}  // namespace detail

/// One seed of an experiment: fresh generator, table and schedule.
inline RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  switch (cfg.environment) {
    case EnvironmentKind::cartpole:
      return detail::run_seed(CartPoleEnv{}, cfg.agent.discretizer, cfg.agent.discretizer.size(), cfg, seed);
    case EnvironmentKind::chain:
      return detail::run_seed(ChainEnv{cfg.chain}, ChainIndexer{}, static_cast<std::size_t>(cfg.chain.n_states),
                              cfg, seed);
  }
  throw config_error("unknown environment");
}

inline double max_episode_reward(const ExperimentConfig& cfg) {
  return cfg.environment == EnvironmentKind::cartpole ? CartPoleEnv::max_episode_reward
                                                      : ChainEnv::max_episode_reward;
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs every seed, spreading seeds over `jobs` threads. Results come back
/// sorted by seed and do not depend on `jobs`.
inline std::vector<RunResult> run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1) {
  validate(cfg);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<RunResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = run_single(cfg, seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto n_threads = std::clamp<std::size_t>(jobs, 1, seeds.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

/// Per-configuration statistics for a comparison.
struct ScheduleSummary {
  std::string label;
  std::vector<RunResult> runs;
  std::size_t solve_count = 0;
  std::optional<double> mean_solve_episode;
  /// First episode each run (seed order) scored the maximum reward.
  std::vector<std::optional<std::int64_t>> first_max_reward;
  std::size_t reached_max_count = 0;
  std::optional<double> mean_first_max_reward;
  AggregateCurves curves;
  /// First episode where the mean rolling curve reaches the solve threshold.
  std::optional<std::int64_t> aggregate_solved_at;
};

struct ComparisonReport {
  ScheduleSummary a;
  ScheduleSummary b;
  std::int64_t budget = solve_budget;
  double max_reward = CartPoleEnv::max_episode_reward;
  /// solve_count(a) / solve_count(b); 1 when both are zero, absent when only
  /// b is zero.
  std::optional<double> solve_ratio;
};

inline ScheduleSummary summarize(std::string label, std::vector<RunResult> runs, std::int64_t budget,
                                 double max_reward) {
  ScheduleSummary s;
  s.label = std::move(label);
  s.runs = std::move(runs);
  s.solve_count = solve_count(s.runs, budget);

  double solve_sum = 0.0;
  double first_sum = 0.0;
  for (const auto& r : s.runs) {
    if (r.solved_at && *r.solved_at <= budget) solve_sum += static_cast<double>(*r.solved_at);
    const auto first = first_episode_reaching(r.records, max_reward);
    s.first_max_reward.push_back(first);
    if (first) {
      ++s.reached_max_count;
      first_sum += static_cast<double>(*first);
    }
  }
  if (s.solve_count > 0) s.mean_solve_episode = solve_sum / static_cast<double>(s.solve_count);
  if (s.reached_max_count > 0) s.mean_first_max_reward = first_sum / static_cast<double>(s.reached_max_count);

  s.curves = aggregate_runs(s.runs);
  for (std::size_t e = 0; e < s.curves.episodes(); ++e) {
    const auto& m = s.curves.mean_rolling[e];
    if (m && *m >= solve_threshold) {
      s.aggregate_solved_at = static_cast<std::int64_t>(e + 1);
      break;
    }
  }
  return s;
}

inline std::optional<double> solve_ratio(std::size_t a, std::size_t b) {
  if (b == 0) return a == 0 ? std::optional<double>(1.0) : std::nullopt;
  return static_cast<double>(a) / static_cast<double>(b);
}

inline void check_same_protocol(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.episodes != b.episodes) throw config_error("compare: configs differ in episode count");
  auto sa = a.seeds, sb = b.seeds;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) throw config_error("compare: configs differ in seed set");
  if (a.environment != b.environment) throw config_error("compare: configs differ in environment");
  if (a.environment == EnvironmentKind::chain &&
      (a.chain.n_states != b.chain.n_states || a.chain.max_steps != b.chain.max_steps))
    throw config_error("compare: configs differ in chain parameters");
}

/// Runs both configurations on the same seeds and episode budget.
inline ComparisonReport compare(const ExperimentConfig& a, const ExperimentConfig& b, unsigned jobs = 1,
                                std::int64_t budget = solve_budget) {
  validate(a);
  validate(b);
  check_same_protocol(a, b);
  ComparisonReport rep;
  rep.budget = budget;
  rep.max_reward = max_episode_reward(a);
  rep.a = summarize(a.display_label(), run_experiment(a, jobs), budget, rep.max_reward);
  rep.b = summarize(b.display_label(), run_experiment(b, jobs), budget, rep.max_reward);
  rep.solve_ratio = solve_ratio(rep.a.solve_count, rep.b.solve_count);
  return rep;
}

namespace detail {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json summary_to_json(const ScheduleSummary& s) {
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    runs.push_back({{"seed", s.runs[i].seed},
                    {"solved_at", opt_json(s.runs[i].solved_at)},
                    {"first_max_reward_episode", opt_json(s.first_max_reward[i])}});
  }
  return {{"label", s.label},
          {"solve_count", s.solve_count},
          {"mean_solve_episode", opt_json(s.mean_solve_episode)},
          {"reached_max_reward_count", s.reached_max_count},
          {"mean_first_max_reward_episode", opt_json(s.mean_first_max_reward)},
          {"aggregate_solved_at", opt_json(s.aggregate_solved_at)},
          {"runs", runs}};
}

}  // namespace detail

inline nlohmann::json report_to_json(const ComparisonReport& r) {
  return {{"budget", r.budget},
          {"max_reward", r.max_reward},
          {"solve_ratio", detail::opt_json(r.solve_ratio)},
          {"a", detail::summary_to_json(r.a)},
          {"b", detail::summary_to_json(r.b)}};
}

}  // namespace rbed
