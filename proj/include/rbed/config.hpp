#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rbed/agent.hpp"
#include "rbed/env.hpp"
#include "rbed/schedule.hpp"

namespace rbed {

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RbedConfig {
  double epsilon_start = 1.0;
  double epsilon_min = 0.0;
  double reward_target = 195.0;
  double reward_increment = 1.0;
  double reward_threshold_init = 0.0;

  friend bool operator==(const RbedConfig&, const RbedConfig&) = default;
};

// Not stated by the source experiment; artifact defaults.
struct ExponentialConfig {
  double epsilon_start = 1.0;
  double decay_rate = 0.995;
  double epsilon_min = 0.01;

  friend bool operator==(const ExponentialConfig&, const ExponentialConfig&) = default;
};

struct ConstantConfig {
  double epsilon = 0.1;

  friend bool operator==(const ConstantConfig&, const ConstantConfig&) = default;
};

using SchedulerConfig = std::variant<RbedConfig, ExponentialConfig, ConstantConfig>;

struct AgentConfig {
  AgentParams params;
  Discretizer discretizer;
};

enum class EnvironmentKind { cartpole, chain };

inline std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> s(20);
  std::iota(s.begin(), s.end(), std::uint64_t{1});
  return s;
}

struct ExperimentConfig {
  std::string label;  // empty: derived from the scheduler kind
  SchedulerConfig scheduler = RbedConfig{};
  AgentConfig agent;
  std::int64_t episodes = 500;
  std::vector<std::uint64_t> seeds = default_seeds();
  EnvironmentKind environment = EnvironmentKind::cartpole;
  ChainParams chain;

  std::string display_label() const;
};

inline std::string scheduler_kind(const SchedulerConfig& s) {
  switch (s.index()) {
    case 0: return "rbed";
    case 1: return "exponential";
    default: return "constant";
  }
}

inline std::string ExperimentConfig::display_label() const {
  return label.empty() ? scheduler_kind(scheduler) : label;
}

/// Builds the initial schedule state; throws config_error on bad parameters.
inline SchedulerState make_scheduler(const SchedulerConfig& cfg) {
  try {
    return std::visit(
        [](const auto& c) -> SchedulerState {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, RbedConfig>)
            return rbed_init(c.reward_target, c.epsilon_start, c.epsilon_min, c.reward_increment,
                             c.reward_threshold_init);
          else if constexpr (std::is_same_v<T, ExponentialConfig>)
            return exp_init(c.epsilon_start, c.decay_rate, c.epsilon_min);
          else
            return constant_init(c.epsilon);
        },
        cfg);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.episodes < 1) throw config_error("episodes must be >= 1");
  if (cfg.seeds.empty()) throw config_error("at least one seed is required");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    throw config_error("seeds must be distinct");
  (void)make_scheduler(cfg.scheduler);
  try {
    cfg.agent.params.validate();
    cfg.agent.discretizer.validate();
    validate(cfg.chain);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON. Every field is optional; unknown keys are rejected so typos surface.

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw config_error(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw config_error(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(where + "." + key + ": wrong type");
  }
}

inline SchedulerConfig scheduler_from_json(const json& j) {
  std::string kind = "rbed";
  if (j.is_object()) read(j, "kind", kind, "scheduler");
  if (kind == "rbed") {
    check_keys(j, "scheduler", {"kind", "epsilon_start", "epsilon_min", "reward_target",
                                "reward_increment", "reward_threshold_init"});
    RbedConfig c;
    read(j, "epsilon_start", c.epsilon_start, "scheduler");
    read(j, "epsilon_min", c.epsilon_min, "scheduler");
    read(j, "reward_target", c.reward_target, "scheduler");
    read(j, "reward_increment", c.reward_increment, "scheduler");
    read(j, "reward_threshold_init", c.reward_threshold_init, "scheduler");
    return c;
  }
  if (kind == "exponential") {
    check_keys(j, "scheduler", {"kind", "epsilon_start", "decay_rate", "epsilon_min"});
    ExponentialConfig c;
    read(j, "epsilon_start", c.epsilon_start, "scheduler");
    read(j, "decay_rate", c.decay_rate, "scheduler");
    read(j, "epsilon_min", c.epsilon_min, "scheduler");
    return c;
  }
  if (kind == "constant") {
    check_keys(j, "scheduler", {"kind", "epsilon"});
    ConstantConfig c;
    read(j, "epsilon", c.epsilon, "scheduler");
    return c;
  }
  throw config_error("scheduler.kind: expected \"rbed\", \"exponential\" or \"constant\", got \"" + kind + "\"");
}

inline json scheduler_to_json(const SchedulerConfig& s) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RbedConfig>)
          return {{"kind", "rbed"},
                  {"epsilon_start", c.epsilon_start},
                  {"epsilon_min", c.epsilon_min},
                  {"reward_target", c.reward_target},
                  {"reward_increment", c.reward_increment},
                  {"reward_threshold_init", c.reward_threshold_init}};
        else if constexpr (std::is_same_v<T, ExponentialConfig>)
          return {{"kind", "exponential"},
                  {"epsilon_start", c.epsilon_start},
                  {"decay_rate", c.decay_rate},
                  {"epsilon_min", c.epsilon_min}};
        else
          return {{"kind", "constant"}, {"epsilon", c.epsilon}};
      },
      s);
}

inline AgentConfig agent_from_json(const json& j) {
  check_keys(j, "agent", {"alpha", "gamma", "buckets", "clip"});
  AgentConfig a;
  read(j, "alpha", a.params.alpha, "agent");
  read(j, "gamma", a.params.gamma, "agent");
  if (j.contains("buckets")) {
    std::vector<std::size_t> b;
    read(j, "buckets", b, "agent");
    if (b.size() != 4) throw config_error("agent.buckets: expected 4 entries");
    std::copy(b.begin(), b.end(), a.discretizer.buckets.begin());
  }
  if (j.contains("clip")) {
    std::vector<std::vector<double>> c;
    read(j, "clip", c, "agent");
    if (c.size() != 4) throw config_error("agent.clip: expected 4 [lo, hi] pairs");
    for (std::size_t d = 0; d < 4; ++d) {
      if (c[d].size() != 2) throw config_error("agent.clip: expected 4 [lo, hi] pairs");
      a.discretizer.clip[d] = Range{c[d][0], c[d][1]};
    }
  }
  return a;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::read;
  detail::check_keys(j, "config", {"label", "scheduler", "agent", "episodes", "seeds", "environment", "chain"});
  ExperimentConfig cfg;
  read(j, "label", cfg.label, "config");
  if (j.contains("scheduler")) cfg.scheduler = detail::scheduler_from_json(j.at("scheduler"));
  if (j.contains("agent")) cfg.agent = detail::agent_from_json(j.at("agent"));
  read(j, "episodes", cfg.episodes, "config");
  read(j, "seeds", cfg.seeds, "config");
  if (j.contains("environment")) {
    std::string env;
    read(j, "environment", env, "config");
    if (env == "cartpole")
      cfg.environment = EnvironmentKind::cartpole;
    else if (env == "chain")
      cfg.environment = EnvironmentKind::chain;
    else
      throw config_error("environment: expected \"cartpole\" or \"chain\", got \"" + env + "\"");
  }
  if (j.contains("chain")) {
    const auto& c = j.at("chain");
    detail::check_keys(c, "chain", {"n_states", "max_steps"});
    read(c, "n_states", cfg.chain.n_states, "chain");
    read(c, "max_steps", cfg.chain.max_steps, "chain");
  }
  validate(cfg);
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json clip = nlohmann::json::array();
  for (const auto& r : cfg.agent.discretizer.clip) clip.push_back({r.lo, r.hi});
  nlohmann::json j = {
      {"scheduler", detail::scheduler_to_json(cfg.scheduler)},
      {"agent",
       {{"alpha", cfg.agent.params.alpha},
        {"gamma", cfg.agent.params.gamma},
        {"buckets", cfg.agent.discretizer.buckets},
        {"clip", clip}}},
      {"episodes", cfg.episodes},
      {"seeds", cfg.seeds},
      {"environment", cfg.environment == EnvironmentKind::cartpole ? "cartpole" : "chain"},
      {"chain", {{"n_states", cfg.chain.n_states}, {"max_steps", cfg.chain.max_steps}}},
  };
  if (!cfg.label.empty()) j["label"] = cfg.label;
  return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

inline constexpr std::uint64_t max_seed_count = 1'000'000;

/// Parses "a..b" (inclusive) or a comma-separated list such as "1,4,9".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  auto to_u64 = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw config_error("invalid seed list '" + text + "'");
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (const std::exception&) {
      throw config_error("invalid seed list '" + text + "'");
    }
  };
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = to_u64(text.substr(0, dots));
    const auto hi = to_u64(text.substr(dots + 2));
    if (lo > hi || hi - lo >= max_seed_count) throw config_error("invalid seed range '" + text + "'");
    for (auto s = lo;; ++s) {
      seeds.push_back(s);
      if (s == hi) break;
    }
    return seeds;
  }
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    seeds.push_back(to_u64(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

}  // namespace rbed
