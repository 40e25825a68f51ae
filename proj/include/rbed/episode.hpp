#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace rbed {

/// Outcome of one episode. `episode` is 1-based; `epsilon` is the value that
/// was in force for the whole episode.
struct EpisodeRecord {
  std::int64_t episode = 0;
  double total_reward = 0.0;
  double epsilon = 0.0;
  std::int64_t steps = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  std::optional<std::int64_t> solved_at;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

}  // namespace rbed
