#include "tow/models/features.hpp"

#include <algorithm>
#include <cmath>

namespace tow::models {

namespace {

int to_count(double x, double scale) { return std::max(0, static_cast<int>(std::lround(x * scale))); }

}  // namespace

Eigen::VectorXd encode_state(const game::AbstractState& s, const game::GameConfig& config) {
  Eigen::VectorXd f(kStateFeatures);
  f(kWaveOffset) = static_cast<double>(s.wave) / config.max_waves;
  for (int i = 0; i < 4; ++i) f(kHealthOffset + i) = s.base_health[i];
  f(kCurrencyOffset) = s.own_currency / kCurrencyScale;
  for (int side = 0; side < 2; ++side) {
    for (game::Lane lane : game::kLanes) {
      for (game::UnitType t : game::kUnitTypes) {
        f(building_feature(side, lane, t)) = s.buildings[side][game::index(lane)][game::index(t)] / kBuildingScale;
      }
    }
    f(kPylonOffset + side) = static_cast<double>(s.pylons[side]) / config.max_pylons;
    for (game::UnitType t : game::kUnitTypes) {
      for (int c = 0; c < game::kNumCells; ++c) {
        f(grid_feature(side, t, c)) = s.unit_grid[side][game::index(t)][c] / kGridScale;
      }
    }
  }
  return f;
}

Eigen::VectorXd encode_action(const game::PlayerAction& a, const game::GameConfig& config) {
  const game::PlayerAction c = a.canonical();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kActionFeatures);
  f(game::index(c.lane)) = 1.0;
  for (int t = 0; t < game::kNumUnitTypes; ++t) f(2 + t) = c.buildings[t] / kBuildingScale;
  f(5) = static_cast<double>(c.pylons) / config.max_pylons;
  return f;
}

game::AbstractState decode_state(const Eigen::Ref<const Eigen::VectorXd>& f, const game::GameConfig& config) {
  game::AbstractState s;
  s.wave = std::max(1, static_cast<int>(std::lround(f(kWaveOffset) * config.max_waves)));
  for (int i = 0; i < 4; ++i) s.base_health[i] = std::clamp(f(kHealthOffset + i), 0.0, 1.0);
  s.own_currency = to_count(f(kCurrencyOffset), kCurrencyScale);
  for (int side = 0; side < 2; ++side) {
    for (game::Lane lane : game::kLanes) {
      for (game::UnitType t : game::kUnitTypes) {
        s.buildings[side][game::index(lane)][game::index(t)] = to_count(f(building_feature(side, lane, t)), kBuildingScale);
      }
    }
    s.pylons[side] = std::min(config.max_pylons, to_count(f(kPylonOffset + side), config.max_pylons));
    for (game::UnitType t : game::kUnitTypes) {
      for (int c = 0; c < game::kNumCells; ++c) {
        s.unit_grid[side][game::index(t)][c] = to_count(f(grid_feature(side, t, c)), kGridScale);
      }
    }
  }
  return s;
}

}  // namespace tow::models
