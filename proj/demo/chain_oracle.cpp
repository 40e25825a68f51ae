// Q-learning on the chain MDP, printed next to the closed-form optimum.

#include <cmath>
#include <cstdio>

#include "rbed/rbed.hpp"

int main() {
  constexpr int n = 5;
  constexpr double gamma = 0.9;
  const rbed::ChainEnv env{rbed::ChainParams{n, 100}};
  rbed::QTable q(n);
  rbed::Rng rng = rbed::seed_rng(7);

  std::int64_t steps = 0;
  while (steps < 100000)
    steps += rbed::run_episode(env, rbed::ChainIndexer{}, q, 0.3, rbed::AgentParams{0.1, gamma}, rng).steps;

  std::printf("state  Q(s,right)  gamma^(n-2-s)\n");
  for (int s = 0; s < n - 1; ++s)
    std::printf("%5d  %10.6f  %13.6f\n", s, q(s, rbed::Action::right), std::pow(gamma, n - 2 - s));
}
