#include "tow/search/build.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tow::search {

namespace {

class Builder {
 public:
  Builder(const SearchContext& ctx, const SearchParams& params, SearchTree& tree)
      : ctx_(ctx), params_(params), tree_(tree) {}

  void expand(int id) {
    const int depth = tree_.nodes[id].depth;
    const game::AbstractState s = tree_.nodes[id].state;
    const int enemy_currency = tree_.nodes[id].enemy_currency;

    const auto own = ctx_.actions(s.own_currency, s.pylons[game::kSelf]);
    const auto theirs = ctx_.actions(enemy_currency, s.pylons[game::kEnemy]);
    const auto friendly = models::rank_actions(ctx_.q, s, own, params_.friendly[depth], ctx_.config);
    const auto enemy = models::rank_actions(ctx_.q, game::flip_perspective(s, enemy_currency), theirs,
                                            params_.enemy[depth], ctx_.config);

    std::vector<models::ActionPair> pairs;
    for (const auto& f : friendly) {
      for (const auto& e : enemy) pairs.emplace_back(f.action, e.action);
    }
    const auto next = ctx_.dynamics.step(s, enemy_currency, pairs);

    std::size_t k = 0;
    for (std::size_t i = 0; i < friendly.size(); ++i) {
      for (std::size_t j = 0; j < enemy.size(); ++j, ++k) {
        TreeNode child;
        child.id = static_cast<int>(tree_.nodes.size());
        child.parent = id;
        child.depth = depth + 1;
        child.friendly = pairs[k].first;
        child.enemy = pairs[k].second;
        child.friendly_rank = static_cast<int>(i);
        child.enemy_rank = static_cast<int>(j);
        child.state = next[k].state;
        child.reward = next[k].reward;
        child.enemy_currency = next_enemy_currency(enemy_currency, child.enemy, child.state, ctx_.config);
        tree_.nodes[id].children.push_back(child.id);
        tree_.nodes.push_back(std::move(child));
      }
    }
    // Children are appended after the loop so references above stay valid.
    for (int c : std::vector<int>(tree_.nodes[id].children)) settle(c);
  }

 private:
  void settle(int id) {
    TreeNode& node = tree_.nodes[id];
    if (params_.guard_terminals && is_terminal_state(node.state, params_.terminal_threshold, ctx_.config)) {
      node.terminal = true;
      node.value = terminal_value(node.state, params_.terminal_threshold);
      node.valued = true;
      return;
    }
    if (node.depth == params_.depth) {
      const auto candidates = ctx_.actions(node.state.own_currency, node.state.pylons[game::kSelf]);
      node.value = models::evaluate_state(ctx_.q, node.state, candidates, ctx_.config);
      node.valued = true;
      return;
    }
    expand(id);
  }

  const SearchContext& ctx_;
  const SearchParams& params_;
  SearchTree& tree_;
};

// Children of `node` grouped into rows by friendly rank, rows in rank order.
std::vector<std::vector<int>> rows_of(const SearchTree& tree, const TreeNode& node) {
  std::vector<std::vector<int>> rows;
  std::vector<int> ranks;
  for (int c : node.children) {
    const int r = tree.nodes[c].friendly_rank;
    std::size_t at = 0;
    while (at < ranks.size() && ranks[at] != r) ++at;
    if (at == ranks.size()) {
      ranks.push_back(r);
      rows.emplace_back();
    }
    rows[at].push_back(c);
  }
  // Insertion sort by rank keeps ties deterministic for any child order.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t j = i; j > 0 && ranks[j] < ranks[j - 1]; --j) {
      std::swap(ranks[j], ranks[j - 1]);
      std::swap(rows[j], rows[j - 1]);
    }
  }
  return rows;
}

// Minimizing child of one row (ties to the lowest enemy rank).
int row_min(const SearchTree& tree, const std::vector<int>& row) {
  int best = row.front();
  for (int c : row) {
    const auto& a = tree.nodes[c];
    const auto& b = tree.nodes[best];
    const double va = a.value.agent_value();
    const double vb = b.value.agent_value();
    if (va < vb || (va == vb && a.enemy_rank < b.enemy_rank)) best = c;
  }
  return best;
}

// Index in `rows` of the maximizing row and its minimizing child.
std::pair<std::size_t, int> choose(const SearchTree& tree, const std::vector<std::vector<int>>& rows) {
  std::size_t best_row = 0;
  int best_child = row_min(tree, rows[0]);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int c = row_min(tree, rows[r]);
    if (tree.nodes[c].value.agent_value() > tree.nodes[best_child].value.agent_value()) {
      best_row = r;
      best_child = c;
    }
  }
  return {best_row, best_child};
}

void backup_node(SearchTree& tree, int id) {
  TreeNode& node = tree.nodes[id];
  if (node.children.empty()) {
    if (!node.valued) throw std::logic_error("minimax_backup: leaf " + std::to_string(id) + " has no value");
    return;
  }
  for (int c : node.children) backup_node(tree, c);
  const auto rows = rows_of(tree, tree.nodes[id]);
  const int chosen = choose(tree, rows).second;
  tree.nodes[id].value = tree.nodes[chosen].value;
  tree.nodes[id].valued = true;
}

}  // namespace

SearchTree build_tree(const game::AbstractState& root, int enemy_currency, const SearchContext& ctx,
                      const SearchParams& params) {
  params.validate();
  if (is_terminal_state(root, params.terminal_threshold, ctx.config)) {
    throw std::invalid_argument("build_tree: root state is terminal");
  }
  SearchTree tree;
  tree.params = params;
  TreeNode r;
  r.state = root;
  r.enemy_currency = enemy_currency;
  tree.nodes.push_back(std::move(r));
  Builder(ctx, params, tree).expand(0);
  minimax_backup(tree);
  return tree;
}

void minimax_backup(SearchTree& tree) {
  if (tree.nodes.empty()) throw std::logic_error("minimax_backup: empty tree");
  for (auto& n : tree.nodes) n.pv = false;
  backup_node(tree, 0);
  int at = 0;
  tree.nodes[0].pv = true;
  while (!tree.nodes[at].children.empty()) {
    at = choose(tree, rows_of(tree, tree.nodes[at])).second;
    tree.nodes[at].pv = true;
  }
}

Decision best_action(const SearchTree& tree) {
  const auto table = root_action_table(tree);
  if (table.empty()) throw std::logic_error("best_action: root has no children");
  return {table.front().action, table.front().value};
}

std::vector<RootEntry> root_action_table(const SearchTree& tree) {
  std::vector<RootEntry> table;
  for (const auto& row : rows_of(tree, tree.root())) {
    const TreeNode& worst = tree.nodes[row_min(tree, row)];
    table.push_back({worst.friendly, worst.friendly_rank, worst.value});
  }
  // Stable insertion by value keeps rank order among equal values.
  std::stable_sort(table.begin(), table.end(), [](const RootEntry& a, const RootEntry& b) {
    return a.value.agent_value() > b.value.agent_value();
  });
  return table;
}

}  // namespace tow::search
