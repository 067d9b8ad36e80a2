#pragma once

#include <optional>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/game/config.hpp"
#include "tow/models/outcome.hpp"

namespace tow::search {

inline constexpr double kTerminalThreshold = 0.01;

struct SearchParams {
  int depth = 2;
  std::vector<int> friendly{20, 5};  // f_d
  std::vector<int> enemy{10, 3};     // e_d
  // Stop at nodes whose predicted base health reaches the terminal threshold.
  // Off reproduces the unguarded search in which such nodes keep expanding.
  bool guard_terminals = true;
  double terminal_threshold = kTerminalThreshold;

  void validate() const;  // throws std::invalid_argument
  friend bool operator==(const SearchParams&, const SearchParams&) = default;
};

// A state node together with the action pair that produced it. Children
// sharing friendly_rank form one row of the minimax matrix.
struct TreeNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  game::PlayerAction friendly;  // incoming action pair (unused at the root)
  game::PlayerAction enemy;
  int friendly_rank = -1;
  int enemy_rank = -1;
  game::AbstractState state;
  int enemy_currency = 0;         // tracked by accounting, not predicted
  models::OutcomeVector reward;   // transition reward head on the incoming edge
  models::OutcomeVector value;    // leaf evaluation or minimax backup
  bool valued = false;
  bool terminal = false;
  bool pv = false;
  std::vector<int> children;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RootEntry {
  game::PlayerAction action;
  int rank = 0;  // friendly rank at the root
  models::OutcomeVector value;

  friend bool operator==(const RootEntry&, const RootEntry&) = default;
};

struct SearchTree {
  SearchParams params;
  std::vector<TreeNode> nodes;  // nodes[0] is the root; ids are indices

  const TreeNode& root() const { return nodes.front(); }
  std::vector<int> pv_path() const;  // node ids from the root along pv flags
  int count_at_depth(int depth) const;

  friend bool operator==(const SearchTree&, const SearchTree&) = default;
};

// Whether a predicted state ends the game: some base at or below the
// threshold, or the wave count past the final wave.
bool is_terminal_state(const game::AbstractState& s, double threshold, const game::GameConfig& config);

// One-hot outcome read off a terminal state: the lowest base (at or below
// the threshold) decides a destruction win, otherwise the lowest base loses
// on timeout. Ties go against the observer.
models::OutcomeVector terminal_value(const game::AbstractState& s, double threshold);

}  // namespace tow::search
