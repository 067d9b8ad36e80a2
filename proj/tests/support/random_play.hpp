#pragma once

#include <cstdint>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/game/rng.hpp"
#include "tow/game/simulator.hpp"

namespace tow::testing_support {

struct RandomStep {
  game::MicroState before;
  game::PlayerAction p1;
  game::PlayerAction p2;
  game::WaveResult result;
};

// One game between two uniform-random players, wave by wave.
inline std::vector<RandomStep> random_game(std::uint64_t seed, const game::GameConfig& cfg) {
  game::SplitMix64 pick{seed ^ 0x9e3779b97f4a7c15ULL};
  std::vector<RandomStep> steps;
  game::MicroState s = game::new_game(cfg, seed);
  while (true) {
    const auto a1 = game::legal_actions(s, game::Player::One, cfg);
    const auto a2 = game::legal_actions(s, game::Player::Two, cfg);
    RandomStep step{s, a1[pick.next() % a1.size()], a2[pick.next() % a2.size()], {}};
    step.result = game::resolve_wave(s, step.p1, step.p2, cfg);
    s = step.result.state;
    const bool done = step.result.outcome.has_value();
    steps.push_back(std::move(step));
    if (done) return steps;
  }
}

// Abstract states from both perspectives across several random games.
inline std::vector<game::AbstractState> sample_abstract_states(int games, std::uint64_t seed,
                                                               const game::GameConfig& cfg) {
  std::vector<game::AbstractState> out;
  for (int g = 0; g < games; ++g) {
    for (const auto& step : random_game(seed + g, cfg)) {
      out.push_back(game::abstract(step.before, game::Player::One, cfg));
      out.push_back(game::abstract(step.before, game::Player::Two, cfg));
    }
  }
  return out;
}

}  // namespace tow::testing_support
