#pragma once

#include <Eigen/Dense>

#include "tow/game/abstraction.hpp"
#include "tow/game/config.hpp"
#include "tow/game/types.hpp"

namespace tow::models {

// State feature layout (see docs/features.md):
//   0        wave / max_waves
//   1..4     base health, [self top, self bottom, enemy top, enemy bottom]
//   5        own currency / 2000
//   6..17    buildings[side][lane][type] / 20
//   18..19   pylons[side] / max_pylons
//   20..67   unit_grid[side][type][cell] / 30
inline constexpr int kStateFeatures = 68;
inline constexpr int kActionFeatures = 6;  // lane one-hot (2), buildings added / 20 (3), pylons added / max_pylons

inline constexpr int kWaveOffset = 0;
inline constexpr int kHealthOffset = 1;
inline constexpr int kCurrencyOffset = 5;
inline constexpr int kBuildingOffset = 6;
inline constexpr int kPylonOffset = 18;
inline constexpr int kGridOffset = 20;

inline constexpr double kCurrencyScale = 2000.0;
inline constexpr double kBuildingScale = 20.0;
inline constexpr double kGridScale = 30.0;

constexpr int building_feature(int side, game::Lane lane, game::UnitType type) {
  return kBuildingOffset + (side * game::kNumLanes + game::index(lane)) * game::kNumUnitTypes + game::index(type);
}
constexpr int grid_feature(int side, game::UnitType type, int cell) {
  return kGridOffset + (side * game::kNumUnitTypes + game::index(type)) * game::kNumCells + cell;
}

Eigen::VectorXd encode_state(const game::AbstractState& s, const game::GameConfig& config);
Eigen::VectorXd encode_action(const game::PlayerAction& a, const game::GameConfig& config);

// Inverse of encode_state: counts are rounded and clamped at zero, healths
// clamped to [0,1].
game::AbstractState decode_state(const Eigen::Ref<const Eigen::VectorXd>& f, const game::GameConfig& config);

}  // namespace tow::models
