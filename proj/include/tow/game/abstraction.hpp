#pragma once

#include <array>

#include "tow/game/config.hpp"
#include "tow/game/simulator.hpp"
#include "tow/game/types.hpp"

namespace tow::game {

// Side indices of an abstract state: always relative to the observing player.
inline constexpr int kSelf = 0;
inline constexpr int kEnemy = 1;

// Health slots of AbstractState::base_health.
constexpr int health_slot(int side, Lane lane) { return side * kNumLanes + index(lane); }

// What the agent observes before a wave. Everything is expressed from the
// observer's side: side 0 is the observer, and grid cells run from the
// observer's base (cell 0) to the enemy base (cell 3) within each lane.
// Cells 0-3 belong to the top lane, 4-7 to the bottom lane.
struct AbstractState {
  int wave = 1;
  std::array<double, 4> base_health{};  // normalized, [self top, self bottom, enemy top, enemy bottom]
  int own_currency = 0;
  std::array<std::array<std::array<int, kNumUnitTypes>, kNumLanes>, 2> buildings{};  // [side][lane][type]
  std::array<int, 2> pylons{};
  std::array<std::array<std::array<int, kNumCells>, kNumUnitTypes>, 2> unit_grid{};  // [side][type][cell]

  double health(int side, Lane lane) const { return base_health[health_slot(side, lane)]; }
  int lane_units(int side, Lane lane) const;
  int lane_units(int side, UnitType type, Lane lane) const;

  friend bool operator==(const AbstractState&, const AbstractState&) = default;
};

constexpr int cell_index(Lane lane, int cell) { return index(lane) * kCellsPerLane + cell; }

AbstractState abstract(const MicroState& state, Player perspective, const GameConfig& config);

// The same position seen by the other side. `other_currency` replaces the
// observer's currency, which the other side cannot see.
AbstractState flip_perspective(const AbstractState& s, int other_currency);

// A micro state whose abstraction from `perspective` is `s`: units sit at cell
// centres with full health, enemy currency is `enemy_currency`.
MicroState embed(const AbstractState& s, Player perspective, int enemy_currency, const GameConfig& config);

}  // namespace tow::game
