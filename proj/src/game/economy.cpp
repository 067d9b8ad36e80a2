#include "tow/game/economy.hpp"

#include "tow/game/simulator.hpp"

namespace tow::game {

CurrencyEstimate estimate_enemy_currency(std::span<const ObservedWave> history, const GameConfig& config) {
  long long estimate = config.start_currency;
  bool inconsistent = false;
  for (const ObservedWave& w : history) {
    const int pylons_after = w.before.pylons[kEnemy] + w.enemy_purchase.pylons;
    estimate += config.stipend(pylons_after) - action_cost(w.enemy_purchase, config);
    if (estimate < 0) {
      inconsistent = true;
      estimate = 0;
    }
  }
  return CurrencyEstimate{static_cast<int>(estimate), inconsistent};
}

PlayerAction infer_purchase(const AbstractState& before, const AbstractState& after, int side) {
  PlayerAction a;
  a.pylons = std::max(0, after.pylons[side] - before.pylons[side]);
  int best_total = 0;
  for (Lane lane : kLanes) {
    std::array<int, kNumUnitTypes> added{};
    int total = 0;
    for (int t = 0; t < kNumUnitTypes; ++t) {
      added[t] = std::max(0, after.buildings[side][index(lane)][t] - before.buildings[side][index(lane)][t]);
      total += added[t];
    }
    if (total > best_total) {
      best_total = total;
      a.lane = lane;
      a.buildings = added;
    }
  }
  return a.canonical();
}

}  // namespace tow::game
