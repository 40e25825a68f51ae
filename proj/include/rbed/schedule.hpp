#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

namespace rbed {

/// Reward-based epsilon decay.
///
/// Epsilon drops by a fixed `change` each time an episode's reward meets the
/// current threshold; the threshold then rises by `reward_increment`. Both
/// quantities are recomputed from the trigger count rather than accumulated,
/// so after k triggers epsilon is exactly `epsilon_start - k * change`
/// (clamped at `epsilon_min`) with no drift.
struct RbedState {
  double epsilon = 1.0;
  double epsilon_start = 1.0;
  double epsilon_min = 0.0;
  double reward_threshold = 0.0;
  double reward_threshold_init = 0.0;
  double reward_increment = 1.0;
  double change = 0.0;
  std::uint64_t decays = 0;

  friend bool operator==(const RbedState&, const RbedState&) = default;
};

/// Multiplicative decay applied once per episode, floored at `epsilon_min`.
struct ExpState {
  double epsilon = 1.0;
  double decay_rate = 0.995;
  double epsilon_min = 0.01;

  friend bool operator==(const ExpState&, const ExpState&) = default;
};

struct ConstantState {
  double epsilon = 0.1;

  friend bool operator==(const ConstantState&, const ConstantState&) = default;
};

using SchedulerState = std::variant<RbedState, ExpState, ConstantState>;

namespace detail {

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

/// The number of decay steps equals `reward_target`, so
/// change = (epsilon_start - epsilon_min) / reward_target.
inline RbedState rbed_init(double reward_target, double epsilon_start = 1.0,
                           double epsilon_min = 0.0,
                           double reward_increment = 1.0,
                           double reward_threshold_init = 0.0) {
  if (!(reward_target > 0.0) || !std::isfinite(reward_target))
    throw std::invalid_argument("rbed: reward_target must be a positive finite number");
  if (!detail::is_probability(epsilon_start) || !detail::is_probability(epsilon_min))
    throw std::invalid_argument("rbed: epsilon_start and epsilon_min must lie in [0, 1]");
  if (epsilon_min > epsilon_start)
    throw std::invalid_argument("rbed: epsilon_min must not exceed epsilon_start");
  if (!(reward_increment > 0.0) || !std::isfinite(reward_increment))
    throw std::invalid_argument("rbed: reward_increment must be a positive finite number");
  if (!std::isfinite(reward_threshold_init))
    throw std::invalid_argument("rbed: reward_threshold_init must be finite");

  RbedState s;
  s.epsilon = epsilon_start;
  s.epsilon_start = epsilon_start;
  s.epsilon_min = epsilon_min;
  s.reward_threshold = reward_threshold_init;
  s.reward_threshold_init = reward_threshold_init;
  s.reward_increment = reward_increment;
  s.change = (epsilon_start - epsilon_min) / reward_target;
  s.decays = 0;
  return s;
}

/// At most one decay per call, however far `last_reward` exceeds the threshold.
inline RbedState rbed_update(RbedState s, double last_reward) {
  if (!(last_reward >= s.reward_threshold)) return s;
  ++s.decays;
  const auto k = static_cast<double>(s.decays);
  s.epsilon = std::max(s.epsilon_min, s.epsilon_start - k * s.change);
  s.reward_threshold = s.reward_threshold_init + k * s.reward_increment;
  return s;
}

inline ExpState exp_init(double epsilon_start = 1.0, double decay_rate = 0.995,
                         double epsilon_min = 0.01) {
  if (!detail::is_probability(epsilon_start) || !detail::is_probability(epsilon_min))
    throw std::invalid_argument("exponential: epsilon_start and epsilon_min must lie in [0, 1]");
  if (epsilon_min > epsilon_start)
    throw std::invalid_argument("exponential: epsilon_min must not exceed epsilon_start");
  if (!(decay_rate > 0.0 && decay_rate < 1.0))
    throw std::invalid_argument("exponential: decay_rate must lie in (0, 1)");
  return ExpState{epsilon_start, decay_rate, epsilon_min};
}

inline ExpState exp_update(ExpState s) {
  s.epsilon = std::max(s.epsilon_min, s.epsilon * s.decay_rate);
  return s;
}

inline ConstantState constant_init(double epsilon) {
  if (!detail::is_probability(epsilon))
    throw std::invalid_argument("constant: epsilon must lie in [0, 1]");
  return ConstantState{epsilon};
}

inline double current_epsilon(const SchedulerState& state) {
  return std::visit([](const auto& s) { return s.epsilon; }, state);
}

/// Episode-end hook. RBED reacts to the reward, exponential ignores it,
/// constant is the identity.
inline SchedulerState scheduler_update(const SchedulerState& state, double last_reward) {
  return std::visit(
      [last_reward](const auto& s) -> SchedulerState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RbedState>) {
          return rbed_update(s, last_reward);
        } else if constexpr (std::is_same_v<T, ExpState>) {
          return exp_update(s);
        } else {
          return s;
        }
      },
      state);
}

inline std::string scheduler_kind(const SchedulerState& state) {
  switch (state.index()) {
    case 0: return "rbed";
    case 1: return "exponential";
    default: return "constant";
  }
}

}  // namespace rbed
