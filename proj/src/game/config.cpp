#include "tow/game/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace tow::game {

namespace {

constexpr std::array<std::string_view, kNumUnitTypes> kTypeKeys{"marine", "baneling", "immortal"};

std::string fmt_double(double v) {
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;  // shortest text that reads back exactly
  return std::string(buf, end);
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

// Binds each key to a field so reading and writing share one table.
struct KeyBinding {
  std::string key;
  std::function<std::string(const GameConfig&)> get;
  std::function<void(GameConfig&, const std::string&, const std::string&)> set;
};

template <typename Field>
KeyBinding int_key(std::string key, Field field) {
  return {std::move(key), [field](GameConfig c) { return std::to_string(field(c)); },
          [field](GameConfig& c, const std::string& k, const std::string& v) { field(c) = parse_int(k, v); }};
}

template <typename Field>
KeyBinding real_key(std::string key, Field field) {
  return {std::move(key), [field](GameConfig c) { return fmt_double(field(c)); },
          [field](GameConfig& c, const std::string& k, const std::string& v) { field(c) = parse_double(k, v); }};
}

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> table = [] {
    std::vector<KeyBinding> t;
    t.push_back(int_key("game.max_waves", [](GameConfig& c) -> int& { return c.max_waves; }));
    t.push_back(int_key("game.ticks_per_wave", [](GameConfig& c) -> int& { return c.ticks_per_wave; }));
    t.push_back(real_key("game.lane_length", [](GameConfig& c) -> double& { return c.lane_length; }));
    t.push_back(real_key("game.base_health_max", [](GameConfig& c) -> double& { return c.base_health_max; }));
    t.push_back(int_key("game.start_currency", [](GameConfig& c) -> int& { return c.start_currency; }));
    t.push_back(int_key("game.base_stipend", [](GameConfig& c) -> int& { return c.base_stipend; }));
    t.push_back(int_key("game.pylon_stipend_bonus", [](GameConfig& c) -> int& { return c.pylon_stipend_bonus; }));
    t.push_back(int_key("game.max_pylons", [](GameConfig& c) -> int& { return c.max_pylons; }));
    t.push_back(int_key("game.pylon_cost", [](GameConfig& c) -> int& { return c.pylon_cost; }));
    t.push_back(real_key("game.rps_multiplier", [](GameConfig& c) -> double& { return c.rps_multiplier; }));
    t.push_back(real_key("game.damage_jitter", [](GameConfig& c) -> double& { return c.damage_jitter; }));
    for (int i = 0; i < kNumUnitTypes; ++i) {
      const std::string name(kTypeKeys[i]);
      t.push_back(int_key("game.cost." + name, [i](GameConfig& c) -> int& { return c.building_costs[i]; }));
      t.push_back(real_key("game." + name + ".hp", [i](GameConfig& c) -> double& { return c.unit_stats[i].hp; }));
      t.push_back(real_key("game." + name + ".move_speed",
                           [i](GameConfig& c) -> double& { return c.unit_stats[i].move_speed; }));
      t.push_back(real_key("game." + name + ".attack_range",
                           [i](GameConfig& c) -> double& { return c.unit_stats[i].attack_range; }));
      t.push_back(real_key("game." + name + ".base_damage",
                           [i](GameConfig& c) -> double& { return c.unit_stats[i].base_damage; }));
    }
    return t;
  }();
  return table;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid game config: ") + what);
}

}  // namespace

void GameConfig::validate() const {
  require(max_waves == 40, "max_waves is fixed at 40");
  require(max_pylons == 3, "max_pylons is fixed at 3");
  require(ticks_per_wave > 0, "ticks_per_wave must be positive");
  require(lane_length > 0, "lane_length must be positive");
  require(base_health_max > 0, "base_health_max must be positive");
  require(start_currency > 0, "start_currency must be positive");
  require(base_stipend > 0, "base_stipend must be positive");
  require(pylon_stipend_bonus > 0, "pylon_stipend_bonus must be positive");
  require(pylon_cost > 0, "pylon_cost must be positive");
  for (int c : building_costs) require(c > 0, "building costs must be positive");
  for (const auto& u : unit_stats) {
    require(u.hp > 0 && u.move_speed > 0 && u.attack_range > 0 && u.base_damage > 0,
            "unit stats must be positive");
  }
  require(rps_multiplier > 0, "rps_multiplier must be positive");
  require(damage_jitter >= 0 && damage_jitter < 1, "damage_jitter must lie in [0, 1)");
}

std::string GameConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : game_keys(*this)) out << k << " = " << v << '\n';
  return out.str();
}

std::string GameConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool apply_game_key(GameConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& b : bindings()) {
    if (b.key == key) {
      b.set(cfg, key, value);
      return true;
    }
  }
  return false;
}

std::map<std::string, std::string> game_keys(const GameConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& b : bindings()) out.emplace(b.key, b.get(cfg));
  return out;
}

}  // namespace tow::game
