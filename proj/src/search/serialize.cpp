#include "tow/search/serialize.hpp"

#include <algorithm>
#include <stdexcept>

namespace tow::search {

namespace {

using nlohmann::json;

constexpr const char* kSides[2] = {"self", "enemy"};
constexpr const char* kLaneNames[2] = {"top", "bottom"};
constexpr const char* kTypeNames[3] = {"marine", "baneling", "immortal"};

game::Lane lane_from_name(const std::string& name) {
  if (name == "top") return game::Lane::Top;
  if (name == "bottom") return game::Lane::Bottom;
  throw std::runtime_error("tree document: unknown lane '" + name + "'");
}

template <typename T>
T read(const json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("tree document: missing field '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

json action_to_json(const game::PlayerAction& a) {
  // Purchases are reported per lane; only the chosen lane can be non-zero.
  json j;
  j["lane"] = kLaneNames[game::index(a.lane)];
  for (game::Lane lane : game::kLanes) {
    json purchases;
    for (int t = 0; t < game::kNumUnitTypes; ++t) purchases[kTypeNames[t]] = lane == a.lane ? a.buildings[t] : 0;
    j[kLaneNames[game::index(lane)]] = purchases;
  }
  j["pylons"] = a.pylons;
  return j;
}

game::PlayerAction action_from_json(const json& j) {
  try {
    game::PlayerAction a;
    a.lane = lane_from_name(read<std::string>(j, "lane"));
    const json& chosen = j.at(kLaneNames[game::index(a.lane)]);
    for (int t = 0; t < game::kNumUnitTypes; ++t) a.buildings[t] = read<int>(chosen, kTypeNames[t]);
    a.pylons = read<int>(j, "pylons");
    return a;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("tree document: bad action: ") + e.what());
  }
}

json state_to_json(const game::AbstractState& s) {
  json j;
  j["wave"] = s.wave;
  j["base_health"] = {{"self_top", s.base_health[0]},
                      {"self_bottom", s.base_health[1]},
                      {"enemy_top", s.base_health[2]},
                      {"enemy_bottom", s.base_health[3]}};
  j["own_currency"] = s.own_currency;
  for (int side = 0; side < 2; ++side) {
    j["pylons"][kSides[side]] = s.pylons[side];
    for (int lane = 0; lane < game::kNumLanes; ++lane) {
      j["buildings"][kSides[side]][kLaneNames[lane]] = s.buildings[side][lane];
    }
    for (int t = 0; t < game::kNumUnitTypes; ++t) j["units"][kSides[side]][kTypeNames[t]] = s.unit_grid[side][t];
  }
  return j;
}

game::AbstractState state_from_json(const json& j) {
  try {
    game::AbstractState s;
    s.wave = read<int>(j, "wave");
    const json& h = j.at("base_health");
    s.base_health = {read<double>(h, "self_top"), read<double>(h, "self_bottom"), read<double>(h, "enemy_top"),
                     read<double>(h, "enemy_bottom")};
    s.own_currency = read<int>(j, "own_currency");
    for (int side = 0; side < 2; ++side) {
      s.pylons[side] = j.at("pylons").at(kSides[side]).get<int>();
      for (int lane = 0; lane < game::kNumLanes; ++lane) {
        s.buildings[side][lane] = j.at("buildings").at(kSides[side]).at(kLaneNames[lane]).get<std::array<int, 3>>();
      }
      for (int t = 0; t < game::kNumUnitTypes; ++t) {
        s.unit_grid[side][t] = j.at("units").at(kSides[side]).at(kTypeNames[t]).get<std::array<int, game::kNumCells>>();
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("tree document: bad state: ") + e.what());
  }
}

json outcome_to_json(const models::OutcomeVector& v) { return v.p; }

models::OutcomeVector outcome_from_json(const json& j) {
  try {
    return models::OutcomeVector{j.get<std::array<double, models::kOutcomeSize>>()};
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("tree document: bad outcome vector: ") + e.what());
  }
}

// Rows are in minimax order by score, the raw agent value. win_probability is
// that score clamped to [0,1] so the chart stays sorted; renormalizing the
// vector would reorder nearly every table.
json root_table_to_json(const std::vector<RootEntry>& table) {
  json out = json::array();
  for (const auto& e : table) {
    out.push_back({{"action", action_to_json(e.action)},
                   {"rank", e.rank},
                   {"value", outcome_to_json(e.value)},
                   {"score", e.value.agent_value()},
                   {"win_probability", std::clamp(e.value.agent_value(), 0.0, 1.0)}});
  }
  return out;
}

json tree_to_json(const SearchTree& tree) {
  json j;
  j["schema"] = kTreeSchema;
  j["version"] = kTreeSchemaVersion;
  j["params"] = {{"depth", tree.params.depth},
                 {"friendly", tree.params.friendly},
                 {"enemy", tree.params.enemy},
                 {"guard_terminals", tree.params.guard_terminals},
                 {"terminal_threshold", tree.params.terminal_threshold}};
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent},
                     {"depth", n.depth},
                     {"friendly_rank", n.friendly_rank},
                     {"enemy_rank", n.enemy_rank},
                     {"friendly", action_to_json(n.friendly)},
                     {"enemy", action_to_json(n.enemy)},
                     {"state", state_to_json(n.state)},
                     {"enemy_currency", n.enemy_currency},
                     {"reward", outcome_to_json(n.reward)},
                     {"value", outcome_to_json(n.value)},
                     {"valued", n.valued},
                     {"terminal", n.terminal},
                     {"pv", n.pv},
                     {"children", n.children}});
  }
  j["nodes"] = std::move(nodes);
  return j;
}

SearchTree tree_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kTreeSchema) throw std::runtime_error("tree document: wrong schema");
  if (j.value("version", -1) != kTreeSchemaVersion) {
    throw std::runtime_error("tree document: unsupported version " + j.value("version", json(-1)).dump());
  }
  try {
    SearchTree tree;
    const json& p = j.at("params");
    tree.params.depth = read<int>(p, "depth");
    tree.params.friendly = read<std::vector<int>>(p, "friendly");
    tree.params.enemy = read<std::vector<int>>(p, "enemy");
    tree.params.guard_terminals = read<bool>(p, "guard_terminals");
    tree.params.terminal_threshold = read<double>(p, "terminal_threshold");
    for (const json& jn : j.at("nodes")) {
      TreeNode n;
      n.id = read<int>(jn, "id");
      n.parent = read<int>(jn, "parent");
      n.depth = read<int>(jn, "depth");
      n.friendly_rank = read<int>(jn, "friendly_rank");
      n.enemy_rank = read<int>(jn, "enemy_rank");
      n.friendly = action_from_json(jn.at("friendly"));
      n.enemy = action_from_json(jn.at("enemy"));
      n.state = state_from_json(jn.at("state"));
      n.enemy_currency = read<int>(jn, "enemy_currency");
      n.reward = outcome_from_json(jn.at("reward"));
      n.value = outcome_from_json(jn.at("value"));
      n.valued = read<bool>(jn, "valued");
      n.terminal = read<bool>(jn, "terminal");
      n.pv = read<bool>(jn, "pv");
      n.children = read<std::vector<int>>(jn, "children");
      if (n.id != static_cast<int>(tree.nodes.size())) throw std::runtime_error("tree document: node ids out of order");
      tree.nodes.push_back(std::move(n));
    }
    const int count = static_cast<int>(tree.nodes.size());
    if (count == 0) throw std::runtime_error("tree document: no nodes");
    for (const auto& n : tree.nodes) {
      if (n.parent >= count || (n.id > 0 && n.parent < 0)) throw std::runtime_error("tree document: bad parent link");
      for (int c : n.children) {
        if (c <= 0 || c >= count || tree.nodes[c].parent != n.id) {
          throw std::runtime_error("tree document: bad child link");
        }
      }
    }
    return tree;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("tree document: ") + e.what());
  }
}

std::string serialize_tree(const SearchTree& tree) { return tree_to_json(tree).dump(); }

SearchTree deserialize_tree(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("tree document: ") + e.what());
  }
  return tree_from_json(j);
}

}  // namespace tow::search
