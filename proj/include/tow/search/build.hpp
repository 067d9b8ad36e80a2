#pragma once

#include <vector>

#include "tow/models/q_function.hpp"
#include "tow/search/dynamics.hpp"
#include "tow/search/tree.hpp"

namespace tow::search {

struct SearchContext {
  const models::QFunction& q;
  const Dynamics& dynamics;
  ActionSource actions;
  const game::GameConfig& config;
};

// Pruned depth-limited minimax tree from `root`. At depth d the top f[d]
// friendly and top e[d] enemy actions (ranked by Q, the enemy through a
// perspective flip) are crossed, every pair is stepped through the dynamics,
// and depth-D nodes are valued by evaluate_state. The tree comes back
// backed up, with the principal variation marked. Throws
// std::invalid_argument on a terminal root or bad params.
SearchTree build_tree(const game::AbstractState& root, int enemy_currency, const SearchContext& ctx,
                      const SearchParams& params);

// Minimax over valued leaves: each row (children sharing friendly_rank) takes
// its minimum, the node takes the maximum row; ties go to the lowest rank.
// Sets values and pv flags in place. Throws std::logic_error on an unvalued
// leaf.
void minimax_backup(SearchTree& tree);

struct Decision {
  game::PlayerAction action;
  models::OutcomeVector value;
};

Decision best_action(const SearchTree& tree);

// Root friendly actions with their minimax values, sorted by agent value
// descending (ties by rank).
std::vector<RootEntry> root_action_table(const SearchTree& tree);

}  // namespace tow::search
