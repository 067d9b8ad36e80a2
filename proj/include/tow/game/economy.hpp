#pragma once

#include <span>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/game/config.hpp"

namespace tow::game {

// One resolved wave as the observer saw it: the state before the purchase
// and what the enemy bought during that wave.
struct ObservedWave {
  AbstractState before;
  PlayerAction enemy_purchase;
};

struct CurrencyEstimate {
  int currency = 0;
  bool inconsistent = false;  // raw estimate went negative and was clamped
};

// Replays the enemy's income and spending over the observed history.
CurrencyEstimate estimate_enemy_currency(std::span<const ObservedWave> history, const GameConfig& config);

// Reads the purchase `side` made between two consecutive abstract states
// from its building and pylon deltas.
PlayerAction infer_purchase(const AbstractState& before, const AbstractState& after, int side);

}  // namespace tow::game
