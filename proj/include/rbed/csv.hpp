#pragma once

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "rbed/episode.hpp"
#include "rbed/metrics.hpp"

namespace rbed {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::filesystem::path run_csv_name(std::uint64_t seed) {
  return "run_seed" + std::to_string(seed) + ".csv";
}

inline constexpr const char* aggregate_csv_name = "aggregate.csv";

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::filesystem::filesystem_error("cannot open for writing", path,
                                            std::error_code(errno, std::generic_category()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out)
    throw std::filesystem::filesystem_error("write failed", path, std::error_code(errno, std::generic_category()));
}

}  // namespace detail

inline std::string run_csv(const RunResult& run) {
  std::string s = "episode,reward,epsilon,steps\n";
  for (const auto& r : run.records) {
    s += std::to_string(r.episode);
    s += ',';
    s += format_double(r.total_reward);
    s += ',';
    s += format_double(r.epsilon);
    s += ',';
    s += std::to_string(r.steps);
    s += '\n';
  }
  return s;
}

inline std::string aggregate_csv(const AggregateCurves& agg) {
  std::string s = "episode,mean_reward,mean_rolling100,mean_epsilon\n";
  for (std::size_t e = 0; e < agg.episodes(); ++e) {
    s += std::to_string(e + 1);
    s += ',';
    s += format_double(agg.mean_reward[e]);
    s += ',';
    if (agg.mean_rolling[e]) s += format_double(*agg.mean_rolling[e]);
    s += ',';
    s += format_double(agg.mean_epsilon[e]);
    s += '\n';
  }
  return s;
}

/// Writes one `run_seed<seed>.csv` per run plus `aggregate.csv` into `dir`
/// (created if missing). Returns the written paths, aggregate last.
inline std::vector<std::filesystem::path> emit_csv(std::span<const RunResult> runs,
                                                   const std::filesystem::path& dir) {
  if (runs.empty()) throw std::invalid_argument("emit_csv: no results to write");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& run : runs) {
    auto p = dir / run_csv_name(run.seed);
    detail::write_file(p, run_csv(run));
    written.push_back(std::move(p));
  }
  auto agg = dir / aggregate_csv_name;
  detail::write_file(agg, aggregate_csv(aggregate_runs(runs)));
  written.push_back(std::move(agg));
  return written;
}

namespace detail {

inline double parse_double(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

}  // namespace detail

/// Reads back a file written by `aggregate_csv`.
inline AggregateCurves read_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::filesystem::filesystem_error("cannot open for reading", path,
                                            std::error_code(errno, std::generic_category()));
  std::string line;
  if (!std::getline(in, line) || line != "episode,mean_reward,mean_rolling100,mean_epsilon")
    throw std::runtime_error(path.string() + ": not an aggregate CSV (unexpected header)");

  AggregateCurves agg;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 4)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 4 columns");
    agg.mean_reward.push_back(detail::parse_double(f[1], path, lineno));
    agg.mean_rolling.push_back(f[2].empty() ? std::nullopt
                                            : std::optional<double>(detail::parse_double(f[2], path, lineno)));
    agg.mean_epsilon.push_back(detail::parse_double(f[3], path, lineno));
  }
  return agg;
}

}  // namespace rbed
