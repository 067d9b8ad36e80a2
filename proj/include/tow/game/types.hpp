#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tow::game {

inline constexpr int kNumPlayers = 2;
inline constexpr int kNumLanes = 2;
inline constexpr int kNumUnitTypes = 3;
inline constexpr int kCellsPerLane = 4;
inline constexpr int kNumCells = kNumLanes * kCellsPerLane;
inline constexpr int kNumWinConditions = 6;

enum class Player : std::uint8_t { One = 0, Two = 1 };
enum class Lane : std::uint8_t { Top = 0, Bottom = 1 };

// Also indexes building types: each building produces units of its own type.
enum class UnitType : std::uint8_t { Marine = 0, Baneling = 1, Immortal = 2 };

constexpr Player opponent(Player p) { return p == Player::One ? Player::Two : Player::One; }
constexpr int index(Player p) { return static_cast<int>(p); }
constexpr int index(Lane l) { return static_cast<int>(l); }
constexpr int index(UnitType t) { return static_cast<int>(t); }
constexpr Lane other_lane(Lane l) { return l == Lane::Top ? Lane::Bottom : Lane::Top; }

inline constexpr std::array<Lane, kNumLanes> kLanes{Lane::Top, Lane::Bottom};
inline constexpr std::array<UnitType, kNumUnitTypes> kUnitTypes{UnitType::Marine, UnitType::Baneling,
                                                                UnitType::Immortal};

// Marine > Immortal > Baneling > Marine.
constexpr bool beats(UnitType attacker, UnitType target) {
  switch (attacker) {
    case UnitType::Marine: return target == UnitType::Immortal;
    case UnitType::Immortal: return target == UnitType::Baneling;
    case UnitType::Baneling: return target == UnitType::Marine;
  }
  return false;
}

// "DestroysTop" means the winner destroyed the opponent's top-lane base.
enum class WinCondition : std::uint8_t {
  P1DestroysTop = 0,
  P1DestroysBottom = 1,
  P1Timeout = 2,
  P2DestroysTop = 3,
  P2DestroysBottom = 4,
  P2Timeout = 5,
};

constexpr WinCondition destroy_condition(Player winner, Lane lane) {
  return static_cast<WinCondition>(index(winner) * 3 + index(lane));
}
constexpr WinCondition timeout_condition(Player winner) {
  return static_cast<WinCondition>(index(winner) * 3 + 2);
}
constexpr Player winner_of(WinCondition c) { return static_cast<int>(c) < 3 ? Player::One : Player::Two; }

std::string_view to_string(Player p);
std::string_view to_string(Lane l);
std::string_view to_string(UnitType t);
std::string_view to_string(WinCondition c);
std::optional<WinCondition> win_condition_from_string(std::string_view s);

struct GameOutcome {
  Player winner = Player::One;
  WinCondition condition = WinCondition::P1Timeout;
  friend bool operator==(const GameOutcome&, const GameOutcome&) = default;
};

// One lane choice plus purchases. Field order defines the canonical action
// ordering used for tie-breaking everywhere (lane, marine, baneling, immortal, pylons).
struct PlayerAction {
  Lane lane = Lane::Top;
  std::array<int, kNumUnitTypes> buildings{};
  int pylons = 0;

  bool buys_buildings() const { return buildings[0] + buildings[1] + buildings[2] > 0; }
  bool is_null() const { return !buys_buildings() && pylons == 0; }
  // Purchases that place nothing in a lane are lane-agnostic and pinned to Top.
  PlayerAction canonical() const {
    PlayerAction a = *this;
    if (!a.buys_buildings()) a.lane = Lane::Top;
    return a;
  }
  // True when the action adds buildings to `lane`.
  bool touches(Lane l) const { return buys_buildings() && lane == l; }

  friend auto operator<=>(const PlayerAction&, const PlayerAction&) = default;
};

std::string describe(const PlayerAction& a);

}  // namespace tow::game
