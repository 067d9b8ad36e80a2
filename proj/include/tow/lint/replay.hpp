#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tow/search/tree.hpp"

namespace tow::lint {

inline constexpr const char* kReplaySchema = "tow.replay";
inline constexpr int kReplaySchemaVersion = 1;

// One decision point: what the agent saw, what both sides did, and the
// explanation tree behind the agent's choice.
struct Decision {
  int index = 0;
  game::AbstractState state;  // true abstract state from the agent's side
  int enemy_currency_estimate = 0;
  game::PlayerAction agent_action;
  game::PlayerAction opponent_action;
  search::SearchTree tree;
  std::vector<search::RootEntry> root_table;

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct Replay {
  std::string game_id;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string agent;
  std::string opponent;
  game::Player agent_seat = game::Player::One;
  std::vector<Decision> decisions;  // ordered by wave
  game::GameOutcome outcome;
  int final_wave = 0;

  bool agent_lost() const { return outcome.winner != agent_seat; }
  friend bool operator==(const Replay&, const Replay&) = default;
};

// Without trees the per-decision "tree" field is omitted; trees are then
// stored and served separately.
nlohmann::json replay_to_json(const Replay& replay, bool with_trees);
// Reads a replay document; decisions without an inline tree keep an empty one.
Replay replay_from_json(const nlohmann::json& j);

}  // namespace tow::lint
