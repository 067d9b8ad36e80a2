#include "tow/service/library.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tow/search/serialize.hpp"

namespace tow::service {

namespace fs = std::filesystem;

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json entry_to_json(const GameEntry& e) {
  return {{"game_id", e.game_id},       {"config_hash", e.config_hash}, {"seed", e.seed},
          {"agent", e.agent},           {"opponent", e.opponent},       {"agent_lost", e.agent_lost},
          {"condition", e.condition},   {"decisions", e.decisions}};
}

namespace {

GameEntry entry_from_json(const nlohmann::json& j) {
  return {j.at("game_id").get<std::string>(), j.at("config_hash").get<std::string>(),
          j.at("seed").get<std::uint64_t>(),   j.at("agent").get<std::string>(),
          j.at("opponent").get<std::string>(), j.at("agent_lost").get<bool>(),
          j.at("condition").get<std::string>(), j.at("decisions").get<int>()};
}

std::string dump(const nlohmann::json& j) { return j.dump(1) + "\n"; }

}  // namespace

bool ReplayLibrary::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::vector<GameEntry> ReplayLibrary::entries() const {
  const fs::path index = root_ / "index.json";
  if (!fs::exists(index)) return {};
  try {
    const auto j = nlohmann::json::parse(read_text(index));
    if (j.value("schema", "") != kIndexSchema || j.value("version", -1) != kIndexSchemaVersion) {
      throw std::runtime_error("library index: wrong schema or version");
    }
    std::vector<GameEntry> out;
    for (const auto& e : j.at("games")) out.push_back(entry_from_json(e));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("library index: ") + e.what());
  }
}

std::optional<GameEntry> ReplayLibrary::entry(const std::string& game_id) const {
  for (auto& e : entries()) {
    if (e.game_id == game_id) return e;
  }
  return std::nullopt;
}

void ReplayLibrary::write_index(const std::vector<GameEntry>& entries) const {
  nlohmann::json games = nlohmann::json::array();
  for (const auto& e : entries) games.push_back(entry_to_json(e));
  write_atomically(root_ / "index.json",
                   dump({{"schema", kIndexSchema}, {"version", kIndexSchemaVersion}, {"games", std::move(games)}}));
}

void ReplayLibrary::add(const lint::Replay& replay) {
  if (!valid_id(replay.game_id)) throw std::runtime_error("invalid game id '" + replay.game_id + "'");
  auto all = entries();
  const fs::path dir = game_dir(replay.game_id);
  if (fs::exists(dir) || std::any_of(all.begin(), all.end(), [&](const GameEntry& e) {
        return e.game_id == replay.game_id;
      })) {
    throw std::runtime_error("game '" + replay.game_id + "' already exists");
  }
  const fs::path staging = root_ / "games" / (".staging-" + replay.game_id);
  fs::remove_all(staging);
  fs::create_directories(staging / "trees");
  write_atomically(staging / "replay.json", dump(lint::replay_to_json(replay, false)));
  for (const auto& d : replay.decisions) {
    write_atomically(staging / "trees" / (std::to_string(d.index) + ".json"), search::serialize_tree(d.tree) + "\n");
  }
  fs::rename(staging, dir);
  all.push_back({replay.game_id, replay.config_hash, replay.seed, replay.agent, replay.opponent, replay.agent_lost(),
                 std::string(game::to_string(replay.outcome.condition)), static_cast<int>(replay.decisions.size())});
  write_index(all);
}

std::string ReplayLibrary::replay_text(const std::string& game_id) const {
  if (!valid_id(game_id) || !entry(game_id)) throw std::out_of_range("unknown game '" + game_id + "'");
  return read_text(game_dir(game_id) / "replay.json");
}

std::string ReplayLibrary::tree_text(const std::string& game_id, int decision) const {
  const auto e = valid_id(game_id) ? entry(game_id) : std::nullopt;
  if (!e) throw std::out_of_range("unknown game '" + game_id + "'");
  if (decision < 0 || decision >= e->decisions) {
    throw std::out_of_range("game '" + game_id + "' has no decision " + std::to_string(decision));
  }
  return read_text(game_dir(game_id) / "trees" / (std::to_string(decision) + ".json"));
}

lint::Replay ReplayLibrary::load(const std::string& game_id, bool with_trees) const {
  lint::Replay r = lint::replay_from_json(nlohmann::json::parse(replay_text(game_id)));
  if (with_trees) {
    for (auto& d : r.decisions) d.tree = search::deserialize_tree(tree_text(game_id, d.index));
  }
  return r;
}

}  // namespace tow::service
