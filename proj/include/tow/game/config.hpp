#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "tow/game/types.hpp"

namespace tow::game {

struct UnitStats {
  double hp = 0;
  double move_speed = 0;    // lane lengths per tick
  double attack_range = 0;  // lane lengths
  double base_damage = 0;   // hp per tick

  friend bool operator==(const UnitStats&, const UnitStats&) = default;
};

// Rules and balance of a game. The numeric defaults are the documented
// balance (see docs/config.md); max_pylons and max_waves are fixed by the rules.
struct GameConfig {
  int max_waves = 40;
  int ticks_per_wave = 30;
  double lane_length = 1.0;
  double base_health_max = 2000.0;
  int start_currency = 100;
  int base_stipend = 100;
  int pylon_stipend_bonus = 75;
  int max_pylons = 3;
  std::array<int, kNumUnitTypes> building_costs{50, 75, 200};
  int pylon_cost = 150;
  std::array<UnitStats, kNumUnitTypes> unit_stats{{
      {60.0, 0.020, 0.05, 3.0},   // Marine
      {40.0, 0.030, 0.03, 4.0},   // Baneling
      {100.0, 0.015, 0.05, 2.0},  // Immortal
  }};
  double rps_multiplier = 2.0;
  double damage_jitter = 0.2;

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  int stipend(int pylons) const { return base_stipend + pylons * pylon_stipend_bonus; }

  // Canonical "key = value" text; equal configs give equal text.
  std::string to_text() const;
  // FNV-1a over to_text(), rendered as 16 hex digits.
  std::string hash() const;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

// Applies "game.*" keys. Returns false if `key` is not a game key.
bool apply_game_key(GameConfig& cfg, const std::string& key, const std::string& value);

// Every game key with its current value, in canonical order.
std::map<std::string, std::string> game_keys(const GameConfig& cfg);

}  // namespace tow::game
