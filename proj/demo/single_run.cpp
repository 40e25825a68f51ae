// Trains one tabular agent on CartPole-v0 under each schedule and prints a
// coarse trace of reward and epsilon.

#include <cstdio>

#include "rbed/rbed.hpp"

int main() {
  const rbed::Discretizer grid;
  const rbed::AgentParams params;

  for (const rbed::SchedulerState& initial : {rbed::SchedulerState{rbed::rbed_init(195)},
                                             rbed::SchedulerState{rbed::exp_init(1.0, 0.995, 0.01)}}) {
    rbed::Rng rng = rbed::seed_rng(1);
    rbed::QTable q(grid.size());
    rbed::SchedulerState schedule = initial;
    std::vector<rbed::EpisodeRecord> records;

    std::printf("%s\n", rbed::scheduler_kind(schedule).c_str());
    for (int e = 1; e <= 500; ++e) {
      auto rec = rbed::run_episode(rbed::CartPoleEnv{}, grid, q, rbed::current_epsilon(schedule), params, rng);
      rec.episode = e;
      schedule = rbed::scheduler_update(schedule, rec.total_reward);
      records.push_back(rec);
      if (e % 50 == 0) std::printf("  episode %3d  reward %5.0f  epsilon %.3f\n", e, rec.total_reward, rec.epsilon);
    }
    const auto solved = rbed::solved_at(records);
    std::printf("  solved at: %s\n", solved ? std::to_string(*solved).c_str() : "never");
  }
}
