#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tow/lint/replay.hpp"

namespace tow::service {

inline constexpr const char* kIndexSchema = "tow.library";
inline constexpr int kIndexSchemaVersion = 1;

struct GameEntry {
  std::string game_id;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string agent;
  std::string opponent;
  bool agent_lost = false;
  std::string condition;
  int decisions = 0;

  friend bool operator==(const GameEntry&, const GameEntry&) = default;
};

// On-disk store of played games:
//   index.json                       entries for every complete game
//   games/<id>/replay.json           replay without trees
//   games/<id>/trees/<n>.json        explanation tree of decision n
// A game directory is written under a temporary name and renamed into
// place; index.json is replaced by write-then-rename. Readers that only
// follow the index never see a partial game.
class ReplayLibrary {
 public:
  explicit ReplayLibrary(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  // Throws std::runtime_error if the id is taken or malformed.
  void add(const lint::Replay& replay);
  std::vector<GameEntry> entries() const;  // empty for a missing library
  std::optional<GameEntry> entry(const std::string& game_id) const;

  // Throws std::out_of_range on an unknown game or decision.
  lint::Replay load(const std::string& game_id, bool with_trees) const;
  std::string tree_text(const std::string& game_id, int decision) const;
  std::string replay_text(const std::string& game_id) const;

  // Ids are restricted to [A-Za-z0-9_-] so they are safe as directory names.
  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path game_dir(const std::string& id) const { return root_ / "games" / id; }
  void write_index(const std::vector<GameEntry>& entries) const;

  std::filesystem::path root_;
};

nlohmann::json entry_to_json(const GameEntry& e);

// Writes `text` to `path` through a sibling temporary file and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tow::service
