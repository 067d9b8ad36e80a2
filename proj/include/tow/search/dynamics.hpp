#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/game/config.hpp"
#include "tow/models/transition_model.hpp"

namespace tow::search {

// Candidate actions for a player holding `currency` and `pylons`.
using ActionSource = std::function<std::vector<game::PlayerAction>(int currency, int pylons)>;

// Every legal purchase, thinned to at most `limit` by an even stride over
// the canonical order when the budget allows more (the null action always
// survives). limit = 0 keeps everything.
ActionSource legal_action_source(const game::GameConfig& config, std::size_t limit = 0);

std::vector<game::PlayerAction> thin_actions(std::vector<game::PlayerAction> actions, std::size_t limit);

// One-wave successor function used to grow the tree, from the observer's
// perspective. `enemy_currency` is the tracked enemy budget at `s`.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual std::vector<models::TransitionPrediction> step(const game::AbstractState& s, int enemy_currency,
                                                         std::span<const models::ActionPair> pairs) const = 0;
};

class LearnedDynamics final : public Dynamics {
 public:
  LearnedDynamics(const models::TransitionModel& model, game::GameConfig config)
      : model_(model), config_(std::move(config)) {}
  std::vector<models::TransitionPrediction> step(const game::AbstractState& s, int enemy_currency,
                                                 std::span<const models::ActionPair> pairs) const override;

 private:
  const models::TransitionModel& model_;
  game::GameConfig config_;
};

// Ground truth: embeds the abstract state into a micro state (units at cell
// centres, full hp), resolves the wave and abstracts the result. The wave's
// randomness is a fixed function of `seed`.
class SimulatorDynamics final : public Dynamics {
 public:
  SimulatorDynamics(game::GameConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {}
  std::vector<models::TransitionPrediction> step(const game::AbstractState& s, int enemy_currency,
                                                 std::span<const models::ActionPair> pairs) const override;

 private:
  game::GameConfig config_;
  std::uint64_t seed_;
};

// Enemy budget after a wave: spend, then collect the stipend for the
// enemy's pylon count in the successor.
int next_enemy_currency(int enemy_currency, const game::PlayerAction& enemy_action,
                        const game::AbstractState& next, const game::GameConfig& config);

}  // namespace tow::search
