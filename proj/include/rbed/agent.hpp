#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbed/env.hpp"
#include "rbed/episode.hpp"
#include "rbed/rng.hpp"

namespace rbed {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Maps a CartPole state onto a flat bucket index.
///
/// Each dimension is split into equal-width buckets over its clip range;
/// values outside the range fall into the edge bucket. Dimension order is
/// (x, x_dot, theta, theta_dot) with x the most significant digit.
struct Discretizer {
  std::array<std::size_t, 4> buckets{3, 3, 6, 6};
  std::array<Range, 4> clip{{{-2.4, 2.4}, {-3.0, 3.0}, {-0.2095, 0.2095}, {-2.0, 2.0}}};

  void validate() const {
    for (std::size_t d = 0; d < 4; ++d) {
      if (buckets[d] == 0) throw std::invalid_argument("discretizer: bucket counts must be >= 1");
      if (!(clip[d].lo < clip[d].hi) || !std::isfinite(clip[d].lo) || !std::isfinite(clip[d].hi))
        throw std::invalid_argument("discretizer: clip ranges must satisfy lo < hi");
    }
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (auto b : buckets) n *= b;
    return n;
  }

  std::size_t bucket(std::size_t dim, double v) const {
    const auto n = buckets[dim];
    const auto [lo, hi] = clip[dim];
    if (!(v > lo)) return 0;
    if (v >= hi) return n - 1;
    const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n));
    return std::min(i, n - 1);
  }

  std::array<std::size_t, 4> bucket_tuple(const CartPoleState& s) const {
    return {bucket(0, s.x), bucket(1, s.x_dot), bucket(2, s.theta), bucket(3, s.theta_dot)};
  }

  std::size_t flat_index(const std::array<std::size_t, 4>& t) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < 4; ++d) idx = idx * buckets[d] + t[d];
    return idx;
  }

  std::size_t operator()(const CartPoleState& s) const { return flat_index(bucket_tuple(s)); }
};

inline std::size_t discretize(const CartPoleState& s, const Discretizer& d) { return d(s); }

/// Chain positions are already small integers.
struct ChainIndexer {
  std::size_t operator()(const ChainState& s) const { return static_cast<std::size_t>(s.position); }
};

/// Dense state x action table of value estimates, zero-initialised.
class QTable {
 public:
  explicit QTable(std::size_t n_states) : n_states_(n_states), values_(n_states * num_actions, 0.0) {
    if (n_states == 0) throw std::invalid_argument("qtable: need at least one state");
  }

  std::size_t n_states() const noexcept { return n_states_; }

  double& operator()(std::size_t s, Action a) { return values_.at(s * num_actions + index(a)); }
  double operator()(std::size_t s, Action a) const { return values_.at(s * num_actions + index(a)); }

  std::span<const double> row(std::size_t s) const {
    if (s >= n_states_) throw std::out_of_range("qtable: state index out of range");
    return std::span<const double>(values_).subspan(s * num_actions, num_actions);
  }

  double max_value(std::size_t s) const {
    const auto r = row(s);
    return *std::max_element(r.begin(), r.end());
  }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  static std::size_t index(Action a) { return static_cast<std::size_t>(a); }

  std::size_t n_states_;
  std::vector<double> values_;
};

struct AgentParams {
  double alpha = 0.1;
  double gamma = 0.99;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("agent: alpha must lie in (0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent: gamma must lie in (0, 1]");
  }
};

/// Epsilon-greedy choice.
///
/// RNG call order is fixed: one `next_f64` decides explore vs exploit. An
/// exploring call then draws the action uniformly; an exploiting call draws
/// only when several actions share the maximum value.
inline Action select_action(const QTable& q, std::size_t s, double epsilon, Rng& rng) {
  const double u = rng.next_f64();
  if (u < epsilon) return static_cast<Action>(rng.next_int_below(num_actions));

  const auto r = q.row(s);
  const double best = *std::max_element(r.begin(), r.end());
  std::array<std::size_t, num_actions> ties{};
  std::size_t n_ties = 0;
  for (std::size_t a = 0; a < r.size(); ++a)
    if (r[a] == best) ties[n_ties++] = a;
  if (n_ties == 1) return static_cast<Action>(ties[0]);
  return static_cast<Action>(ties[rng.next_int_below(n_ties)]);
}

/// One-step Q-learning backup. Terminal transitions do not bootstrap.
inline void q_update(QTable& q, std::size_t s, Action a, double reward, std::size_t s_next, bool done,
                     const AgentParams& params) {
  const double bootstrap = done ? 0.0 : params.gamma * q.max_value(s_next);
  double& v = q(s, a);
  v += params.alpha * (reward + bootstrap - v);
}

template <class E>
concept Environment = requires(const E& env, Rng& rng, const typename E::state_type& s, Action a) {
  { env.reset(rng) } -> std::convertible_to<typename E::state_type>;
  { env.step(s, a).next } -> std::convertible_to<typename E::state_type>;
  { env.step(s, a).reward } -> std::convertible_to<double>;
  { env.step(s, a).done } -> std::convertible_to<bool>;
};

/// Runs one episode from reset to termination, learning online. Epsilon is
/// held fixed for the episode; the caller updates its schedule afterwards.
/// `episode` is left at 0 for the caller to number.
template <Environment Env, class Indexer>
  requires std::invocable<const Indexer&, const typename Env::state_type&>
EpisodeRecord run_episode(const Env& env, const Indexer& encode, QTable& q, double epsilon,
                          const AgentParams& params, Rng& rng) {
  EpisodeRecord rec;
  rec.epsilon = epsilon;
  auto state = env.reset(rng);
  std::size_t s = encode(state);
  for (;;) {
    const Action a = select_action(q, s, epsilon, rng);
    const auto out = env.step(state, a);
    const std::size_t s_next = encode(out.next);
    q_update(q, s, a, out.reward, s_next, out.done, params);
    rec.total_reward += out.reward;
    ++rec.steps;
    if (out.done) break;
    state = out.next;
    s = s_next;
  }
  return rec;
}

}  // namespace rbed
