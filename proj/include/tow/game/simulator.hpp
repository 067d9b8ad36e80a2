#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tow/game/config.hpp"
#include "tow/game/rng.hpp"
#include "tow/game/types.hpp"

namespace tow::game {

struct Unit {
  std::uint32_t id = 0;
  Player owner = Player::One;
  UnitType type = UnitType::Marine;
  double position = 0;  // Player One's base sits at 0, Player Two's at lane_length
  double hp = 0;

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct PlayerState {
  int currency = 0;
  int pylons = 0;
  std::array<std::array<int, kNumUnitTypes>, kNumLanes> buildings{};  // [lane][type]
  std::array<double, kNumLanes> base_health{};                        // [lane]

  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

// The full simulator state. `wave` is the wave whose purchases are pending;
// a game that survived all waves ends with wave == max_waves + 1.
struct MicroState {
  int wave = 1;
  std::array<PlayerState, kNumPlayers> players{};
  std::array<std::vector<Unit>, kNumLanes> lanes{};
  SplitMix64 rng{};
  std::uint32_t next_unit_id = 1;

  const PlayerState& player(Player p) const { return players[index(p)]; }
  PlayerState& player(Player p) { return players[index(p)]; }

  friend bool operator==(const MicroState&, const MicroState&) = default;
};

MicroState new_game(const GameConfig& config, std::uint64_t seed);

int action_cost(const PlayerAction& action, const GameConfig& config);

// All affordable purchases for a player holding `currency` and `pylons`, in
// canonical order, deduplicated after canonicalization. The null action is first.
std::vector<PlayerAction> enumerate_actions(int currency, int pylons, const GameConfig& config);

// Number of actions enumerate_actions would return, without materializing them.
std::size_t count_actions(int currency, int pylons, const GameConfig& config);

// Throws std::logic_error on a terminal state.
std::vector<PlayerAction> legal_actions(const MicroState& state, Player player, const GameConfig& config);

bool is_legal(const MicroState& state, Player player, const PlayerAction& action, const GameConfig& config);

struct WaveResult {
  MicroState state;
  std::optional<GameOutcome> outcome;
};

// Applies both purchases and plays one wave of combat. Throws
// std::invalid_argument on an illegal action and std::logic_error on a terminal state.
WaveResult resolve_wave(const MicroState& state, const PlayerAction& p1, const PlayerAction& p2,
                        const GameConfig& config);

std::optional<GameOutcome> terminal_outcome(const MicroState& state, const GameConfig& config);

// Winner when the game goes the distance or bases fall on the same tick: the
// player owning the single lowest base loses; ties fall back to total base
// health; an exact tie goes to Player One.
Player health_tiebreak_winner(const std::array<std::array<double, kNumLanes>, kNumPlayers>& health);

// Position of `x` on the 4-cell grid of a lane, as seen from Player One's side.
int grid_cell(double x, double lane_length);

}  // namespace tow::game
