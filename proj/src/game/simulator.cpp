#include "tow/game/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tow::game {

namespace {

// Slack for "within range" after a unit stops exactly at its range.
constexpr double kRangeEps = 1e-9;

template <typename Visit>
void for_each_purchase(int currency, int pylons_owned, const GameConfig& cfg, Visit&& visit) {
  const auto& cost = cfg.building_costs;
  const int pylon_room = std::max(0, cfg.max_pylons - pylons_owned);
  for (Lane lane : kLanes) {
    for (int m = 0; m * cost[0] <= currency; ++m) {
      const int after_m = currency - m * cost[0];
      for (int b = 0; b * cost[1] <= after_m; ++b) {
        const int after_b = after_m - b * cost[1];
        for (int i = 0; i * cost[2] <= after_b; ++i) {
          const int after_i = after_b - i * cost[2];
          const bool buys = m + b + i > 0;
          if (!buys && lane != Lane::Top) continue;
          for (int p = 0; p <= pylon_room && p * cfg.pylon_cost <= after_i; ++p) {
            visit(lane, m, b, i, p);
          }
        }
      }
    }
  }
}

// Index of the enemy unit nearest to `owner`'s side of the battle line.
// Units never pass each other, so this is the enemy's frontmost unit.
int enemy_front(const std::vector<Unit>& units, Player owner) {
  int best = -1;
  for (int k = 0; k < static_cast<int>(units.size()); ++k) {
    const Unit& u = units[k];
    if (u.owner == owner) continue;
    if (best < 0) {
      best = k;
    } else if (owner == Player::One ? u.position < units[best].position : u.position > units[best].position) {
      best = k;
    }
  }
  return best;
}

double gap_to(const Unit& u, double target_position) { return std::abs(target_position - u.position); }

double enemy_base_position(Player owner, double lane_length) { return owner == Player::One ? lane_length : 0.0; }

void tick_lane(std::vector<Unit>& units, std::array<PlayerState, kNumPlayers>& players, Lane lane, SplitMix64& rng,
               int tick, const GameConfig& cfg) {
  if (units.empty()) return;
  const int n = static_cast<int>(units.size());
  const std::array<int, kNumPlayers> fronts{enemy_front(units, Player::One), enemy_front(units, Player::Two)};

  std::vector<double> unit_damage(n, 0.0);
  std::array<double, kNumPlayers> base_damage{};  // damage taken by each player's base in this lane
  std::vector<char> attacked(n, 0);

  for (int k = 0; k < n; ++k) {
    const Unit& u = units[k];
    const UnitStats& stats = cfg.unit_stats[index(u.type)];
    const int front = fronts[index(u.owner)];
    const double target_pos = front >= 0 ? units[front].position : enemy_base_position(u.owner, cfg.lane_length);
    if (gap_to(u, target_pos) > stats.attack_range + kRangeEps) continue;
    const double jitter = 1.0 + cfg.damage_jitter * (2.0 * rng.uniform() - 1.0);
    double dmg = stats.base_damage * jitter;
    if (front >= 0) {
      if (beats(u.type, units[front].type)) dmg *= cfg.rps_multiplier;
      unit_damage[front] += dmg;
    } else {
      base_damage[index(opponent(u.owner))] += dmg;
    }
    attacked[k] = 1;
  }

  for (int p = 0; p < kNumPlayers; ++p) {
    double& h = players[p].base_health[index(lane)];
    h = std::max(0.0, h - base_damage[p]);
  }

  std::vector<Unit> survivors;
  std::vector<char> still_attacking;
  survivors.reserve(n);
  for (int k = 0; k < n; ++k) {
    Unit u = units[k];
    u.hp -= unit_damage[k];
    if (u.hp <= 0) continue;
    survivors.push_back(u);
    still_attacking.push_back(attacked[k]);
  }
  units.swap(survivors);

  // Movement is sequential so units stop at range and never cross; the side
  // that moves first alternates every tick.
  const Player first = tick % 2 == 0 ? Player::One : Player::Two;
  for (Player mover : {first, opponent(first)}) {
    const int front = enemy_front(units, mover);
    const double target_pos = front >= 0 ? units[front].position : enemy_base_position(mover, cfg.lane_length);
    for (int k = 0; k < static_cast<int>(units.size()); ++k) {
      Unit& u = units[k];
      if (u.owner != mover || still_attacking[k]) continue;
      const UnitStats& stats = cfg.unit_stats[index(u.type)];
      const double step = std::min(stats.move_speed, std::max(0.0, gap_to(u, target_pos) - stats.attack_range));
      u.position = mover == Player::One ? std::min(cfg.lane_length, u.position + step)
                                        : std::max(0.0, u.position - step);
    }
  }
}

bool any_base_down(const MicroState& s) {
  for (const auto& p : s.players) {
    for (double h : p.base_health) {
      if (h <= 0) return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(Player p) { return p == Player::One ? "P1" : "P2"; }
std::string_view to_string(Lane l) { return l == Lane::Top ? "top" : "bottom"; }
std::string_view to_string(UnitType t) {
  switch (t) {
    case UnitType::Marine: return "marine";
    case UnitType::Baneling: return "baneling";
    case UnitType::Immortal: return "immortal";
  }
  return "?";
}

namespace {
constexpr std::array<std::string_view, kNumWinConditions> kConditionNames{
    "P1DestroysTop", "P1DestroysBottom", "P1Timeout", "P2DestroysTop", "P2DestroysBottom", "P2Timeout"};
}

std::string_view to_string(WinCondition c) { return kConditionNames[static_cast<int>(c)]; }

std::optional<WinCondition> win_condition_from_string(std::string_view s) {
  for (int i = 0; i < kNumWinConditions; ++i) {
    if (kConditionNames[i] == s) return static_cast<WinCondition>(i);
  }
  return std::nullopt;
}

std::string describe(const PlayerAction& a) {
  if (a.is_null()) return "save";
  std::string out;
  if (a.buys_buildings()) {
    out += std::string(to_string(a.lane)) + ":";
    for (UnitType t : kUnitTypes) {
      if (a.buildings[index(t)] > 0) out += " +" + std::to_string(a.buildings[index(t)]) + " " + std::string(to_string(t));
    }
  }
  if (a.pylons > 0) {
    if (!out.empty()) out += ",";
    out += " +" + std::to_string(a.pylons) + " pylon";
  }
  if (!out.empty() && out.front() == ' ') out.erase(0, 1);
  return out;
}

MicroState new_game(const GameConfig& config, std::uint64_t seed) {
  config.validate();
  MicroState s;
  s.wave = 1;
  for (auto& p : s.players) {
    p.currency = config.start_currency;
    p.pylons = 0;
    p.base_health = {config.base_health_max, config.base_health_max};
  }
  s.rng.state = seed;
  return s;
}

int action_cost(const PlayerAction& action, const GameConfig& config) {
  int total = action.pylons * config.pylon_cost;
  for (int t = 0; t < kNumUnitTypes; ++t) total += action.buildings[t] * config.building_costs[t];
  return total;
}

std::vector<PlayerAction> enumerate_actions(int currency, int pylons, const GameConfig& config) {
  std::vector<PlayerAction> out;
  for_each_purchase(currency, pylons, config, [&](Lane lane, int m, int b, int i, int p) {
    out.push_back(PlayerAction{lane, {m, b, i}, p});
  });
  return out;
}

std::size_t count_actions(int currency, int pylons, const GameConfig& config) {
  std::size_t n = 0;
  for_each_purchase(currency, pylons, config, [&](Lane, int, int, int, int) { ++n; });
  return n;
}

std::vector<PlayerAction> legal_actions(const MicroState& state, Player player, const GameConfig& config) {
  if (terminal_outcome(state, config)) throw std::logic_error("legal_actions: game is over");
  const PlayerState& ps = state.player(player);
  return enumerate_actions(ps.currency, ps.pylons, config);
}

bool is_legal(const MicroState& state, Player player, const PlayerAction& action, const GameConfig& config) {
  if (action.pylons < 0) return false;
  for (int n : action.buildings) {
    if (n < 0) return false;
  }
  const PlayerState& ps = state.player(player);
  return action_cost(action, config) <= ps.currency && ps.pylons + action.pylons <= config.max_pylons;
}

WaveResult resolve_wave(const MicroState& state, const PlayerAction& p1, const PlayerAction& p2,
                        const GameConfig& config) {
  if (terminal_outcome(state, config)) throw std::logic_error("resolve_wave: game is over");
  const std::array<PlayerAction, kNumPlayers> actions{p1.canonical(), p2.canonical()};
  for (Player p : {Player::One, Player::Two}) {
    if (!is_legal(state, p, actions[index(p)], config)) {
      throw std::invalid_argument("resolve_wave: illegal action for " + std::string(to_string(p)) + ": " +
                                  describe(actions[index(p)]));
    }
  }

  WaveResult result{state, std::nullopt};
  MicroState& next = result.state;
  for (Player p : {Player::One, Player::Two}) {
    const PlayerAction& a = actions[index(p)];
    PlayerState& ps = next.player(p);
    ps.currency -= action_cost(a, config);
    ps.pylons += a.pylons;
    for (int t = 0; t < kNumUnitTypes; ++t) ps.buildings[index(a.lane)][t] += a.buildings[t];
  }

  for (Lane lane : kLanes) {
    for (Player p : {Player::One, Player::Two}) {
      const double spawn = p == Player::One ? 0.0 : config.lane_length;
      for (UnitType t : kUnitTypes) {
        const int count = next.player(p).buildings[index(lane)][index(t)];
        for (int k = 0; k < count; ++k) {
          next.lanes[index(lane)].push_back(Unit{next.next_unit_id++, p, t, spawn, config.unit_stats[index(t)].hp});
        }
      }
    }
  }

  // Each lane draws from its own stream so one lane's fighting never shifts the other's dice.
  std::array<SplitMix64, kNumLanes> lane_rng{SplitMix64{next.rng.next()}, SplitMix64{next.rng.next()}};
  for (int tick = 0; tick < config.ticks_per_wave; ++tick) {
    for (Lane lane : kLanes) tick_lane(next.lanes[index(lane)], next.players, lane, lane_rng[index(lane)], tick, config);
    if (any_base_down(next)) break;
  }

  next.wave += 1;
  for (auto& ps : next.players) ps.currency += config.stipend(ps.pylons);
  result.outcome = terminal_outcome(next, config);
  return result;
}

Player health_tiebreak_winner(const std::array<std::array<double, kNumLanes>, kNumPlayers>& health) {
  const double min1 = std::min(health[0][0], health[0][1]);
  const double min2 = std::min(health[1][0], health[1][1]);
  if (min1 != min2) return min1 < min2 ? Player::Two : Player::One;
  const double tot1 = health[0][0] + health[0][1];
  const double tot2 = health[1][0] + health[1][1];
  if (tot1 < tot2) return Player::Two;
  return Player::One;
}

std::optional<GameOutcome> terminal_outcome(const MicroState& state, const GameConfig& config) {
  std::array<std::array<double, kNumLanes>, kNumPlayers> health{};
  std::array<bool, kNumPlayers> lost_base{};
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int l = 0; l < kNumLanes; ++l) {
      health[p][l] = state.players[p].base_health[l];
      if (health[p][l] <= 0) lost_base[p] = true;
    }
  }
  if (lost_base[0] || lost_base[1]) {
    Player winner = lost_base[0] && lost_base[1] ? health_tiebreak_winner(health)
                                                 : (lost_base[1] ? Player::One : Player::Two);
    const auto& victim = health[index(opponent(winner))];
    const Lane lane = victim[index(Lane::Top)] <= 0 ? Lane::Top : Lane::Bottom;
    return GameOutcome{winner, destroy_condition(winner, lane)};
  }
  if (state.wave > config.max_waves) {
    const Player winner = health_tiebreak_winner(health);
    return GameOutcome{winner, timeout_condition(winner)};
  }
  return std::nullopt;
}

int grid_cell(double x, double lane_length) {
  const int c = static_cast<int>(std::floor(x / lane_length * kCellsPerLane));
  return std::clamp(c, 0, kCellsPerLane - 1);
}

}  // namespace tow::game
