#include "tow/search/tree.hpp"

#include <stdexcept>

namespace tow::search {

void SearchParams::validate() const {
  if (depth < 1) throw std::invalid_argument("SearchParams: depth must be at least 1");
  if (static_cast<int>(friendly.size()) != depth || static_cast<int>(enemy.size()) != depth) {
    throw std::invalid_argument("SearchParams: branch lists must have one entry per depth");
  }
  for (int i = 0; i < depth; ++i) {
    if (friendly[i] < 1 || enemy[i] < 1) throw std::invalid_argument("SearchParams: branch counts must be positive");
  }
  if (terminal_threshold < 0 || terminal_threshold >= 1) {
    throw std::invalid_argument("SearchParams: terminal threshold must lie in [0,1)");
  }
}

std::vector<int> SearchTree::pv_path() const {
  std::vector<int> path;
  if (nodes.empty() || !nodes.front().pv) return path;
  int at = 0;
  while (true) {
    path.push_back(at);
    int next = -1;
    for (int c : nodes[at].children) {
      if (nodes[c].pv) {
        next = c;
        break;
      }
    }
    if (next < 0) return path;
    at = next;
  }
}

int SearchTree::count_at_depth(int depth) const {
  int n = 0;
  for (const auto& node : nodes) n += node.depth == depth;
  return n;
}

bool is_terminal_state(const game::AbstractState& s, double threshold, const game::GameConfig& config) {
  if (s.wave > config.max_waves) return true;
  for (double h : s.base_health) {
    if (h <= threshold) return true;
  }
  return false;
}

models::OutcomeVector terminal_value(const game::AbstractState& s, double threshold) {
  // Lowest base, preferring the observer's bases on ties.
  int lowest = 0;
  for (int slot = 1; slot < 4; ++slot) {
    if (s.base_health[slot] < s.base_health[lowest]) lowest = slot;
  }
  const int loser = lowest / game::kNumLanes;
  const int lane = lowest % game::kNumLanes;
  using models::Outcome;
  if (s.base_health[lowest] <= threshold) {
    if (loser == game::kSelf) {
      return models::OutcomeVector::one_hot(lane == 0 ? Outcome::EnemyDestroysTop : Outcome::EnemyDestroysBottom);
    }
    return models::OutcomeVector::one_hot(lane == 0 ? Outcome::SelfDestroysTop : Outcome::SelfDestroysBottom);
  }
  return models::OutcomeVector::one_hot(loser == game::kSelf ? Outcome::EnemyTimeout : Outcome::SelfTimeout);
}

}  // namespace tow::search
