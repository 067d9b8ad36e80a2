#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "minimax_oracle.hpp"
#include "random_play.hpp"
#include "tow/search/build.hpp"
#include "tow/search/serialize.hpp"

namespace tow::search {
namespace {

using game::AbstractState;
using game::GameConfig;
using game::Lane;
using game::PlayerAction;
using models::OutcomeVector;

OutcomeVector agent(double v) { return OutcomeVector{{v, 0, 0, 0, 0, 0}}; }

// Root with one child per (friendly rank, enemy rank) cell of `grid`.
SearchTree grid_tree(const std::vector<std::vector<double>>& grid) {
  SearchTree t;
  t.params.depth = 1;
  t.params.friendly = {static_cast<int>(grid.size())};
  t.params.enemy = {static_cast<int>(grid[0].size())};
  t.nodes.emplace_back();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      TreeNode n;
      n.id = static_cast<int>(t.nodes.size());
      n.parent = 0;
      n.depth = 1;
      n.friendly = PlayerAction{Lane::Top, {static_cast<int>(i), 0, 0}, 0};
      n.friendly_rank = static_cast<int>(i);
      n.enemy_rank = static_cast<int>(j);
      n.value = agent(grid[i][j]);
      n.valued = true;
      t.nodes[0].children.push_back(n.id);
      t.nodes.push_back(n);
    }
  }
  return t;
}

TEST(Backup, HandMinimax) {
  SearchTree one = grid_tree({{0.7, 0.4}});
  minimax_backup(one);
  EXPECT_EQ(one.root().value.agent_value(), 0.4);

  SearchTree two = grid_tree({{0.9, 0.2}, {0.6, 0.5}});
  minimax_backup(two);
  EXPECT_EQ(two.root().value.agent_value(), 0.5);
  EXPECT_EQ(best_action(two).action.buildings[0], 1);
  EXPECT_EQ(two.pv_path(), (std::vector<int>{0, 4}));
  const auto table = root_action_table(two);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].value.agent_value(), 0.5);
  EXPECT_EQ(table[1].value.agent_value(), 0.2);
}

TEST(Backup, TiesGoToLowestRank) {
  SearchTree t = grid_tree({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.6}});
  minimax_backup(t);
  EXPECT_EQ(best_action(t).action.buildings[0], 0);
  EXPECT_EQ(t.pv_path(), (std::vector<int>{0, 1}));
}

TEST(Backup, UnvaluedLeafThrows) {
  SearchTree t = grid_tree({{0.5, 0.5}});
  t.nodes[2].valued = false;
  EXPECT_THROW(minimax_backup(t), std::logic_error);
}

// Random tree of depth <= 3 with shuffled child order, checked against a
// plain recursion.
TEST(Backup, MatchesRecursiveOracleOnRandomTrees) {
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int> branch(1, 3);
  std::uniform_int_distribution<int> depth_pick(1, 3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    SearchTree t;
    const int depth = depth_pick(gen);
    t.nodes.emplace_back();
    std::function<void(int)> grow = [&](int id) {
      if (t.nodes[id].depth == depth || (t.nodes[id].depth > 0 && u(gen) < 0.2)) {
        t.nodes[id].value = agent(std::round(u(gen) * 10) / 10);  // coarse values force ties
        t.nodes[id].valued = true;
        return;
      }
      const int fr = branch(gen);
      const int er = branch(gen);
      std::vector<int> kids;
      for (int i = 0; i < fr; ++i) {
        for (int j = 0; j < er; ++j) {
          TreeNode n;
          n.id = static_cast<int>(t.nodes.size());
          n.parent = id;
          n.depth = t.nodes[id].depth + 1;
          n.friendly_rank = i;
          n.enemy_rank = j;
          n.friendly = PlayerAction{Lane::Top, {i, 0, 0}, 0};
          kids.push_back(n.id);
          t.nodes.push_back(n);
        }
      }
      std::shuffle(kids.begin(), kids.end(), gen);
      t.nodes[id].children = kids;
      for (int k : kids) grow(k);
    };
    grow(0);

    std::function<double(int)> oracle = [&](int id) {
      const auto& n = t.nodes[id];
      if (n.children.empty()) return n.value.agent_value();
      std::map<int, double> rows;
      for (int c : n.children) {
        const double v = oracle(c);
        auto [it, fresh] = rows.emplace(t.nodes[c].friendly_rank, v);
        if (!fresh) it->second = std::min(it->second, v);
      }
      double best = -1;
      for (const auto& [r, v] : rows) best = std::max(best, v);
      return best;
    };
    minimax_backup(t);
    ASSERT_EQ(t.root().value.agent_value(), oracle(0)) << "trial " << trial;
    // The pv leaf carries the root value.
    EXPECT_EQ(t.nodes[t.pv_path().back()].value.agent_value(), t.root().value.agent_value());
  }
}

// Small random models; the transition output is damped so that predicted
// states drift instead of collapsing to terminal at the first step.
struct Models {
  Models() { model.net().layers().back().weight *= 0.05; }
  GameConfig cfg;
  models::QFunction q = models::QFunction::init(21, 32);
  models::TransitionModel model = models::TransitionModel::init(22, 32);
};

AbstractState opening(const GameConfig& cfg, int currency) {
  AbstractState s = game::abstract(game::new_game(cfg, 1), game::Player::One, cfg);
  s.own_currency = currency;
  return s;
}

TEST(BuildTree, SinglePathEqualsLeafEvaluation) {
  Models m;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 64), m.cfg};
  SearchParams p{1, {1}, {1}};
  const AbstractState root = opening(m.cfg, 400);
  const SearchTree t = build_tree(root, 400, ctx, p);
  ASSERT_EQ(t.nodes.size(), 2u);
  const TreeNode& leaf = t.nodes[1];
  EXPECT_TRUE(leaf.valued);
  EXPECT_EQ(t.root().value, leaf.value);
  if (!leaf.terminal) {
    EXPECT_EQ(leaf.value, models::evaluate_state(m.q, leaf.state, ctx.actions(leaf.state.own_currency, leaf.state.pylons[0]), m.cfg));
  }
}

TEST(BuildTree, DefaultParametersBoundTheShape) {
  Models m;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 256), m.cfg};
  const SearchParams p;  // D=2, f=(20,5), e=(10,3)
  const SearchTree t = build_tree(opening(m.cfg, 1500), 1500, ctx, p);
  const auto table = root_action_table(t);
  EXPECT_EQ(table.size(), 20u);
  EXPECT_EQ(t.count_at_depth(1), 200);
  EXPECT_LE(t.count_at_depth(2), 3000);
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_GE(table[i - 1].value.agent_value(), table[i].value.agent_value());
  }
  for (const auto& n : t.nodes) {
    if (n.depth < 2) {
      EXPECT_LE(n.children.size(), static_cast<std::size_t>(p.friendly[n.depth] * p.enemy[n.depth]));
    }
    if (n.terminal) {
      EXPECT_TRUE(n.children.empty());
    }
  }
  const std::string doc = serialize_tree(t);
  EXPECT_LT(doc.size(), 10u * 1024 * 1024);
  EXPECT_EQ(deserialize_tree(doc), t);
}

TEST(BuildTree, MatchesExhaustiveMinimaxOracle) {
  Models m;
  // Marines are the only affordable purchase and the source keeps six.
  m.cfg.building_costs = {50, 100000, 100000};
  m.cfg.pylon_cost = 100000;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 6), m.cfg};
  const SearchParams p{2, {6, 6}, {6, 6}};
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(seed);
    AbstractState root = opening(m.cfg, 50 + static_cast<int>(gen() % 400));
    const int enemy = static_cast<int>(gen() % 400);
    const SearchTree t = build_tree(root, enemy, ctx, p);
    EXPECT_GT(t.count_at_depth(2), 0);
    const auto oracle = testing_support::oracle_root(root, enemy, ctx, p);
    EXPECT_EQ(t.root().value.agent_value(), oracle.value.agent_value());
    const auto chosen = best_action(t).action;
    EXPECT_NE(std::find(oracle.best.begin(), oracle.best.end(), chosen), oracle.best.end());
  }
}

TEST(BuildTree, BestActionInvariantUnderMonotoneLeafTransform) {
  Models m;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 64), m.cfg};
  SearchTree t = build_tree(opening(m.cfg, 600), 600, ctx, SearchParams{2, {4, 3}, {3, 2}});
  const auto before = best_action(t).action;
  const auto pv = t.pv_path();
  for (auto& n : t.nodes) {
    if (n.children.empty()) {
      const double v = n.value.agent_value();
      n.value = agent(0.1 + v * v * v / 27.0 + v / 100.0);
    }
  }
  minimax_backup(t);
  EXPECT_EQ(best_action(t).action, before);
  EXPECT_EQ(t.pv_path(), pv);
}

TEST(BuildTree, TerminalRootRejectedAndGuardStopsExpansion) {
  Models m;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 32), m.cfg};
  AbstractState dead = opening(m.cfg, 200);
  dead.base_health[1] = 0.0;
  EXPECT_THROW(build_tree(dead, 100, ctx, SearchParams{}), std::invalid_argument);

  // A transition model whose health deltas always drive bases to zero.
  models::TransitionModel crusher = m.model;
  auto& last = crusher.net().layers().back();
  last.weight.setZero();
  last.bias.setZero();
  last.bias(models::kHealthOffset + 1) = -5.0;
  LearnedDynamics crush(crusher, m.cfg);
  const SearchContext cctx{m.q, crush, legal_action_source(m.cfg, 32), m.cfg};
  const SearchTree guarded = build_tree(opening(m.cfg, 300), 300, cctx, SearchParams{2, {3, 2}, {2, 2}});
  for (const auto& n : guarded.nodes) {
    if (n.depth > 0) {
      EXPECT_TRUE(n.terminal);
      EXPECT_TRUE(n.children.empty());
      EXPECT_EQ(n.value, OutcomeVector::one_hot(models::Outcome::EnemyDestroysBottom));
    }
  }
  SearchParams off{2, {3, 2}, {2, 2}};
  off.guard_terminals = false;
  const SearchTree unguarded = build_tree(opening(m.cfg, 300), 300, cctx, off);
  EXPECT_EQ(unguarded.count_at_depth(2), 6 * 4);
  for (const auto& n : unguarded.nodes) EXPECT_FALSE(n.terminal);
}

TEST(TerminalValue, Rules) {
  AbstractState s;
  s.base_health = {1.0, 1.0, 0.0, 0.5};
  EXPECT_EQ(terminal_value(s, 0.01), OutcomeVector::one_hot(models::Outcome::SelfDestroysTop));
  s.base_health = {0.3, 0.005, 0.5, 0.5};
  EXPECT_EQ(terminal_value(s, 0.01), OutcomeVector::one_hot(models::Outcome::EnemyDestroysBottom));
  s.base_health = {0.3, 0.6, 0.2, 0.5};
  EXPECT_EQ(terminal_value(s, 0.01), OutcomeVector::one_hot(models::Outcome::SelfTimeout));
  s.base_health = {0.2, 0.6, 0.2, 0.5};
  EXPECT_EQ(terminal_value(s, 0.01), OutcomeVector::one_hot(models::Outcome::EnemyTimeout));
  GameConfig cfg;
  s.wave = 41;
  EXPECT_TRUE(is_terminal_state(s, 0.01, cfg));
  s.wave = 40;
  EXPECT_FALSE(is_terminal_state(s, 0.01, cfg));
}

TEST(Serialize, RoundTripAndSinglePvPath) {
  Models m;
  LearnedDynamics dyn(m.model, m.cfg);
  const SearchContext ctx{m.q, dyn, legal_action_source(m.cfg, 64), m.cfg};
  const SearchTree t = build_tree(opening(m.cfg, 700), 250, ctx, SearchParams{2, {5, 3}, {4, 2}});
  const SearchTree back = deserialize_tree(serialize_tree(t));
  EXPECT_EQ(back, t);
  int pv_count = 0;
  for (const auto& n : t.nodes) pv_count += n.pv;
  const auto path = t.pv_path();
  EXPECT_EQ(static_cast<int>(path.size()), pv_count);
  EXPECT_TRUE(t.nodes[path.back()].children.empty());
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_EQ(t.nodes[path[i]].parent, path[i - 1]);

  auto doc = tree_to_json(t);
  doc["version"] = 99;
  EXPECT_THROW(tree_from_json(doc), std::runtime_error);
  EXPECT_THROW(deserialize_tree("{not json"), std::runtime_error);
  auto broken = tree_to_json(t);
  broken["nodes"][1]["parent"] = 5;
  EXPECT_THROW(tree_from_json(broken), std::runtime_error);
}

TEST(Serialize, ActionsSplitByLane) {
  const PlayerAction a{Lane::Bottom, {2, 0, 1}, 1};
  const auto j = action_to_json(a);
  EXPECT_EQ(j["top"]["marine"], 0);
  EXPECT_EQ(j["bottom"]["marine"], 2);
  EXPECT_EQ(j["bottom"]["immortal"], 1);
  EXPECT_EQ(action_from_json(j), a);
}

TEST(Dynamics, ThinningKeepsNullAndBound) {
  GameConfig cfg;
  const auto all = game::enumerate_actions(2000, 0, cfg);
  const auto thin = thin_actions(all, 100);
  ASSERT_EQ(thin.size(), 100u);
  EXPECT_TRUE(thin.front().is_null());
  EXPECT_TRUE(std::is_sorted(thin.begin(), thin.end()));
  EXPECT_EQ(thin_actions(all, 0).size(), all.size());
}

TEST(Dynamics, SimulatorStepMatchesGroundTruthTransition) {
  GameConfig cfg;
  SimulatorDynamics sim(cfg, 5);
  const AbstractState s = opening(cfg, 300);
  const models::ActionPair pair{PlayerAction{Lane::Top, {2, 0, 0}, 0}, PlayerAction{Lane::Bottom, {1, 0, 0}, 0}};
  const auto next = sim.step(s, 300, std::span(&pair, 1)).front();
  EXPECT_EQ(next.state.wave, 2);
  EXPECT_EQ(next.state.buildings[0][0][0], 2);
  EXPECT_EQ(next.state.buildings[1][1][0], 1);
  EXPECT_EQ(next.state.own_currency, 300 - 100 + cfg.stipend(0));
  EXPECT_EQ(next_enemy_currency(300, pair.second, next.state, cfg), 300 - 50 + cfg.stipend(0));
  EXPECT_EQ(sim.step(s, 300, std::span(&pair, 1)).front().state, next.state);
}

}  // namespace
}  // namespace tow::search
