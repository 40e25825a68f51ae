#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbed/episode.hpp"

namespace rbed {

inline constexpr double solve_threshold = 195.0;
inline constexpr std::size_t solve_window = 100;
inline constexpr std::int64_t solve_budget = 500;

/// Trailing-window means. Element i of the result covers
/// series[i, i + window), so the output has len - window + 1 entries (none
/// if the series is shorter than the window).
///
/// The running sum is Neumaier-compensated; for integer-valued rewards it is
/// exact.
inline std::vector<double> rolling_mean(std::span<const double> series, std::size_t window) {
  if (window == 0) throw std::invalid_argument("rolling_mean: window must be >= 1");
  std::vector<double> out;
  if (series.size() < window) return out;
  out.reserve(series.size() - window + 1);

  double sum = 0.0;
  double comp = 0.0;
  auto add = [&](double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  };
  const auto w = static_cast<double>(window);
  for (std::size_t i = 0; i < series.size(); ++i) {
    add(series[i]);
    if (i >= window) add(-series[i - window]);
    if (i + 1 >= window) out.push_back((sum + comp) / w);
  }
  return out;
}

inline std::vector<double> rewards_of(std::span<const EpisodeRecord> records) {
  std::vector<double> r;
  r.reserve(records.size());
  for (const auto& rec : records) r.push_back(rec.total_reward);
  return r;
}

/// First 1-based episode whose trailing window mean reaches `threshold`.
inline std::optional<std::int64_t> solved_at(std::span<const EpisodeRecord> records,
                                             double threshold = solve_threshold,
                                             std::size_t window = solve_window) {
  const auto rewards = rewards_of(records);
  const auto means = rolling_mean(rewards, window);
  for (std::size_t i = 0; i < means.size(); ++i)
    if (means[i] >= threshold) return static_cast<std::int64_t>(i + window);
  return std::nullopt;
}

/// First 1-based episode whose reward reaches `mark`.
inline std::optional<std::int64_t> first_episode_reaching(std::span<const EpisodeRecord> records,
                                                          double mark) {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].total_reward >= mark) return static_cast<std::int64_t>(i + 1);
  return std::nullopt;
}

inline std::size_t solve_count(std::span<const RunResult> runs, std::int64_t budget = solve_budget) {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [budget](const RunResult& r) {
    return r.solved_at.has_value() && *r.solved_at <= budget;
  }));
}

/// Per-episode means across runs. `mean_rolling` is empty (nullopt) before
/// the first full window; rolling averages are taken per run first and then
/// averaged.
struct AggregateCurves {
  std::vector<double> mean_reward;
  std::vector<std::optional<double>> mean_rolling;
  std::vector<double> mean_epsilon;

  std::size_t episodes() const noexcept { return mean_reward.size(); }

  friend bool operator==(const AggregateCurves&, const AggregateCurves&) = default;
};

namespace detail {

// Sorting before summation makes the mean independent of run order.
// Offsets are summed relative to the smallest value, so equal inputs give
// that value back exactly.
inline double order_free_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const double base = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - base;
  return base + sum / static_cast<double>(values.size());
}

}  // namespace detail

inline AggregateCurves aggregate_runs(std::span<const RunResult> runs,
                                      std::size_t window = solve_window) {
  if (runs.empty()) throw std::invalid_argument("aggregate_runs: no runs given");
  const std::size_t n = runs.front().records.size();
  for (const auto& r : runs)
    if (r.records.size() != n)
      throw std::invalid_argument("aggregate_runs: runs have different episode counts");

  std::vector<std::vector<double>> rolling;
  rolling.reserve(runs.size());
  for (const auto& r : runs) rolling.push_back(rolling_mean(rewards_of(r.records), window));

  AggregateCurves agg;
  agg.mean_reward.resize(n);
  agg.mean_rolling.resize(n);
  agg.mean_epsilon.resize(n);
  std::vector<double> column(runs.size());
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t k = 0; k < runs.size(); ++k) column[k] = runs[k].records[e].total_reward;
    agg.mean_reward[e] = detail::order_free_mean(column);
    for (std::size_t k = 0; k < runs.size(); ++k) column[k] = runs[k].records[e].epsilon;
    agg.mean_epsilon[e] = detail::order_free_mean(column);
    if (e + 1 >= window) {
      for (std::size_t k = 0; k < runs.size(); ++k) column[k] = rolling[k][e + 1 - window];
      agg.mean_rolling[e] = detail::order_free_mean(column);
    }
  }
  return agg;
}

}  // namespace rbed
