#include "tow/search/dynamics.hpp"

#include <algorithm>

#include "tow/game/simulator.hpp"

namespace tow::search {

std::vector<game::PlayerAction> thin_actions(std::vector<game::PlayerAction> actions, std::size_t limit) {
  if (limit == 0 || actions.size() <= limit) return actions;
  std::vector<game::PlayerAction> kept;
  kept.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) kept.push_back(actions[i * actions.size() / limit]);
  return kept;
}

ActionSource legal_action_source(const game::GameConfig& config, std::size_t limit) {
  return [config, limit](int currency, int pylons) {
    return thin_actions(game::enumerate_actions(std::max(0, currency), pylons, config), limit);
  };
}

std::vector<models::TransitionPrediction> LearnedDynamics::step(const game::AbstractState& s, int,
                                                                std::span<const models::ActionPair> pairs) const {
  return model_.predict_batch(s, pairs, config_);
}

std::vector<models::TransitionPrediction> SimulatorDynamics::step(const game::AbstractState& s, int enemy_currency,
                                                                  std::span<const models::ActionPair> pairs) const {
  game::MicroState micro = game::embed(s, game::Player::One, enemy_currency, config_);
  micro.rng = game::SplitMix64{seed_ ^ (static_cast<std::uint64_t>(s.wave) * 0x9e3779b97f4a7c15ULL)};
  std::vector<models::TransitionPrediction> out;
  out.reserve(pairs.size());
  for (const auto& [friendly, enemy] : pairs) {
    const auto result = game::resolve_wave(micro, friendly, enemy, config_);
    models::TransitionPrediction p;
    p.state = game::abstract(result.state, game::Player::One, config_);
    if (result.outcome) p.reward = models::OutcomeVector::from_condition(result.outcome->condition, game::Player::One);
    out.push_back(p);
  }
  return out;
}

int next_enemy_currency(int enemy_currency, const game::PlayerAction& enemy_action, const game::AbstractState& next,
                        const game::GameConfig& config) {
  const int left = std::max(0, enemy_currency - game::action_cost(enemy_action, config));
  return left + config.stipend(next.pylons[game::kEnemy]);
}

}  // namespace tow::search
