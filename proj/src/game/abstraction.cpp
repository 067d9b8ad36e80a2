#include "tow/game/abstraction.hpp"

#include <utility>

namespace tow::game {

int AbstractState::lane_units(int side, Lane lane) const {
  int n = 0;
  for (UnitType t : kUnitTypes) n += lane_units(side, t, lane);
  return n;
}

int AbstractState::lane_units(int side, UnitType type, Lane lane) const {
  int n = 0;
  for (int c = 0; c < kCellsPerLane; ++c) n += unit_grid[side][index(type)][cell_index(lane, c)];
  return n;
}

AbstractState abstract(const MicroState& state, Player perspective, const GameConfig& config) {
  AbstractState out;
  out.wave = state.wave;
  out.own_currency = state.player(perspective).currency;
  const std::array<Player, 2> sides{perspective, opponent(perspective)};
  for (int side = 0; side < 2; ++side) {
    const PlayerState& ps = state.player(sides[side]);
    out.pylons[side] = ps.pylons;
    out.buildings[side] = ps.buildings;
    for (Lane lane : kLanes) out.base_health[health_slot(side, lane)] = ps.base_health[index(lane)] / config.base_health_max;
  }
  for (Lane lane : kLanes) {
    for (const Unit& u : state.lanes[index(lane)]) {
      const int side = u.owner == perspective ? kSelf : kEnemy;
      int cell = grid_cell(u.position, config.lane_length);
      if (perspective == Player::Two) cell = kCellsPerLane - 1 - cell;
      ++out.unit_grid[side][index(u.type)][cell_index(lane, cell)];
    }
  }
  return out;
}

AbstractState flip_perspective(const AbstractState& s, int other_currency) {
  AbstractState out;
  out.wave = s.wave;
  out.own_currency = other_currency;
  for (int side = 0; side < 2; ++side) {
    const int from = 1 - side;
    out.pylons[side] = s.pylons[from];
    out.buildings[side] = s.buildings[from];
    for (Lane lane : kLanes) out.base_health[health_slot(side, lane)] = s.base_health[health_slot(from, lane)];
    for (int t = 0; t < kNumUnitTypes; ++t) {
      for (Lane lane : kLanes) {
        for (int c = 0; c < kCellsPerLane; ++c) {
          out.unit_grid[side][t][cell_index(lane, c)] = s.unit_grid[from][t][cell_index(lane, kCellsPerLane - 1 - c)];
        }
      }
    }
  }
  return out;
}

MicroState embed(const AbstractState& s, Player perspective, int enemy_currency, const GameConfig& config) {
  MicroState m;
  m.wave = s.wave;
  const std::array<Player, 2> sides{perspective, opponent(perspective)};
  for (int side = 0; side < 2; ++side) {
    PlayerState& ps = m.player(sides[side]);
    ps.currency = side == kSelf ? s.own_currency : enemy_currency;
    ps.pylons = s.pylons[side];
    ps.buildings = s.buildings[side];
    for (Lane lane : kLanes) ps.base_health[index(lane)] = s.health(side, lane) * config.base_health_max;
  }
  const double cell_width = config.lane_length / kCellsPerLane;
  for (int side = 0; side < 2; ++side) {
    for (UnitType t : kUnitTypes) {
      for (Lane lane : kLanes) {
        for (int c = 0; c < kCellsPerLane; ++c) {
          const int count = s.unit_grid[side][index(t)][cell_index(lane, c)];
          const int p1_cell = perspective == Player::One ? c : kCellsPerLane - 1 - c;
          for (int k = 0; k < count; ++k) {
            m.lanes[index(lane)].push_back(Unit{m.next_unit_id++, sides[side], t, (p1_cell + 0.5) * cell_width,
                                                config.unit_stats[index(t)].hp});
          }
        }
      }
    }
  }
  return m;
}

}  // namespace tow::game
