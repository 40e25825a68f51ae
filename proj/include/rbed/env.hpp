#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "rbed/rng.hpp"

namespace rbed {

enum class Action : std::uint8_t { left = 0, right = 1 };

inline constexpr std::size_t num_actions = 2;

/// Raised when an environment is stepped from a state that already ended.
class terminal_step_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class State>
struct Transition {
  State next;
  double reward = 0.0;
  bool done = false;
};

// ---------------------------------------------------------------------------
// CartPole-v0

/// Classic-control CartPole constants. Fixed so results stay comparable.
struct CartPoleParams {
  static constexpr double gravity = 9.8;
  static constexpr double mass_cart = 1.0;
  static constexpr double mass_pole = 0.1;
  static constexpr double total_mass = mass_cart + mass_pole;
  static constexpr double pole_half_length = 0.5;
  static constexpr double pole_mass_length = mass_pole * pole_half_length;
  static constexpr double force_mag = 10.0;
  static constexpr double tau = 0.02;
  static constexpr double theta_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double x_threshold = 2.4;
  static constexpr int max_steps = 200;
  static constexpr double reset_bound = 0.05;
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps_elapsed = 0;

  friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

using StepOutcome = Transition<CartPoleState>;

inline bool cartpole_terminal(const CartPoleState& s) {
  using P = CartPoleParams;
  return std::abs(s.x) > P::x_threshold || std::abs(s.theta) > P::theta_threshold ||
         s.steps_elapsed >= P::max_steps;
}

/// Draws x, x_dot, theta, theta_dot (in that order) uniformly from
/// [-0.05, 0.05). Consumes exactly four doubles from `rng`.
inline CartPoleState cartpole_reset(Rng& rng) {
  constexpr double b = CartPoleParams::reset_bound;
  auto draw = [&] { return -b + 2.0 * b * rng.next_f64(); };
  CartPoleState s;
  s.x = draw();
  s.x_dot = draw();
  s.theta = draw();
  s.theta_dot = draw();
  s.steps_elapsed = 0;
  return s;
}

namespace detail {

#if defined(__GNUC__)
#define RBED_NOINLINE [[gnu::noinline]]
#else
#define RBED_NOINLINE
#endif

// Kept out of line so every step goes through the same libm path; inlined
// copies may be fused into sincos, which can differ from sin/cos in the last
// bit and break the left/right mirror symmetry of the dynamics.
RBED_NOINLINE inline std::pair<double, double> sin_cos(double theta) {
  return {std::sin(theta), std::cos(theta)};
}

#undef RBED_NOINLINE

}  // namespace detail

/// One Euler step under an arbitrary horizontal force. `cartpole_step` is the
/// two-action wrapper; tests use this directly for the force-free case.
inline StepOutcome cartpole_step_force(const CartPoleState& s, double force) {
  using P = CartPoleParams;
  if (cartpole_terminal(s))
    throw terminal_step_error("cartpole: step called on a terminal state");

  const auto [sin_t, cos_t] = detail::sin_cos(s.theta);
  const double temp =
      (force + P::pole_mass_length * s.theta_dot * s.theta_dot * sin_t) / P::total_mass;
  const double theta_acc =
      (P::gravity * sin_t - cos_t * temp) /
      (P::pole_half_length * (4.0 / 3.0 - P::mass_pole * cos_t * cos_t / P::total_mass));
  const double x_acc = temp - P::pole_mass_length * theta_acc * cos_t / P::total_mass;

  // Positions advance with the old velocities.
  StepOutcome out;
  out.next.x = s.x + P::tau * s.x_dot;
  out.next.x_dot = s.x_dot + P::tau * x_acc;
  out.next.theta = s.theta + P::tau * s.theta_dot;
  out.next.theta_dot = s.theta_dot + P::tau * theta_acc;
  out.next.steps_elapsed = s.steps_elapsed + 1;
  out.reward = 1.0;
  out.done = cartpole_terminal(out.next);
  return out;
}

inline StepOutcome cartpole_step(const CartPoleState& s, Action a) {
  const double force =
      a == Action::right ? CartPoleParams::force_mag : -CartPoleParams::force_mag;
  return cartpole_step_force(s, force);
}

struct CartPoleEnv {
  using state_type = CartPoleState;

  static constexpr double max_episode_reward = CartPoleParams::max_steps;

  state_type reset(Rng& rng) const { return cartpole_reset(rng); }
  StepOutcome step(const state_type& s, Action a) const { return cartpole_step(s, a); }
};

// ---------------------------------------------------------------------------
// Chain MDP: states 0..n-1 in a line, start at 0, reward 1 on reaching n-1.

struct ChainParams {
  int n_states = 5;
  /// Truncation cap so a policy that never reaches the goal still ends.
  int max_steps = 100;
};

struct ChainState {
  int position = 0;
  int steps_elapsed = 0;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

using ChainOutcome = Transition<ChainState>;

inline void validate(const ChainParams& p) {
  if (p.n_states < 2) throw std::invalid_argument("chain: n_states must be >= 2");
  if (p.max_steps < 1) throw std::invalid_argument("chain: max_steps must be >= 1");
}

inline ChainState chain_reset() { return ChainState{}; }

inline ChainOutcome chain_step(const ChainParams& p, const ChainState& s, Action a) {
  if (s.position < 0 || s.position >= p.n_states - 1)
    throw terminal_step_error("chain: step called from the terminal or an invalid position");
  if (s.steps_elapsed >= p.max_steps)
    throw terminal_step_error("chain: step called after the step cap");

  ChainOutcome out;
  out.next.position = a == Action::right ? s.position + 1 : std::max(0, s.position - 1);
  out.next.steps_elapsed = s.steps_elapsed + 1;
  const bool goal = out.next.position == p.n_states - 1;
  out.reward = goal ? 1.0 : 0.0;
  out.done = goal || out.next.steps_elapsed >= p.max_steps;
  return out;
}

struct ChainEnv {
  using state_type = ChainState;

  static constexpr double max_episode_reward = 1.0;

  ChainParams params;

  state_type reset(Rng&) const { return chain_reset(); }
  ChainOutcome step(const state_type& s, Action a) const { return chain_step(params, s, a); }
};

}  // namespace rbed
