#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "tow/lint/injection.hpp"
#include "tow/lint/interest.hpp"
#include "tow/lint/scan.hpp"
#include "tow/search/build.hpp"

namespace tow::lint {
namespace {

using game::AbstractState;
using game::Lane;
using game::PlayerAction;
using models::Outcome;
using models::OutcomeVector;
using search::SearchTree;
using search::TreeNode;

AbstractState healthy() {
  AbstractState s;
  s.base_health = {1, 1, 1, 1};
  return s;
}

int add_node(SearchTree& t, int parent, const AbstractState& s, PlayerAction f = {}, PlayerAction e = {}) {
  TreeNode n;
  n.id = static_cast<int>(t.nodes.size());
  n.parent = parent;
  n.depth = parent < 0 ? 0 : t.nodes[parent].depth + 1;
  n.friendly = f;
  n.enemy = e;
  n.state = s;
  n.value = OutcomeVector::one_hot(Outcome::SelfTimeout);
  n.valued = true;
  if (parent >= 0) t.nodes[parent].children.push_back(n.id);
  t.nodes.push_back(n);
  return n.id;
}

std::vector<Finding> run(const std::string& id, const SearchTree& t, const LintOptions& o = {}) {
  return find_detector(id)->run(t, o);
}

PlayerAction buy(Lane lane, int marines) { return PlayerAction{lane, {marines, 0, 0}, 0}; }

TEST(HealthDetector, ToleranceAndSeverity) {
  AbstractState root = healthy();
  root.base_health[game::health_slot(game::kSelf, Lane::Top)] = 0.25;
  SearchTree t;
  add_node(t, -1, root);
  const double rises[] = {0.004, 0.01, 0.12, -0.2};
  for (double r : rises) {
    AbstractState s = root;
    s.base_health[0] = 0.25 + r;
    add_node(t, 0, s);
  }
  const auto f = run("health", t);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].nodes, (std::vector<int>{0, 2}));
  EXPECT_NEAR(f[0].severity, 0.01, 1e-12);
  EXPECT_FALSE(f[0].severe);
  EXPECT_EQ(f[1].nodes, (std::vector<int>{0, 3}));
  EXPECT_TRUE(f[1].severe);
  LintOptions loose;
  loose.health_tolerance = 0.02;
  EXPECT_EQ(run("health", t, loose).size(), 1u);
}

TEST(LaneDetector, FlagsTheOutlierAmongSiblings) {
  SearchTree t;
  AbstractState root = healthy();
  root.buildings[0][0][0] = 1;
  root.buildings[0][1][0] = 1;
  add_node(t, -1, root);
  AbstractState kid = root;
  kid.unit_grid[0][0][game::cell_index(Lane::Bottom, 1)] = 2;
  // Three siblings buy only on top; the bottom lane must agree.
  add_node(t, 0, kid, buy(Lane::Top, 1));
  add_node(t, 0, kid, buy(Lane::Top, 2));
  AbstractState odd = kid;
  odd.unit_grid[0][0][game::cell_index(Lane::Bottom, 1)] = 3;
  const int outlier = add_node(t, 0, odd, buy(Lane::Top, 3));
  // A bottom purchase may change the bottom lane freely.
  AbstractState bottom = kid;
  bottom.unit_grid[0][0][game::cell_index(Lane::Bottom, 0)] = 5;
  add_node(t, 0, bottom, buy(Lane::Bottom, 1));
  const auto f = run("lane", t);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].nodes.front(), outlier);

  // Health differences beyond the tolerance count too.
  t.nodes[outlier].state = kid;
  t.nodes[outlier].state.base_health[game::health_slot(game::kEnemy, Lane::Bottom)] = 0.9;
  ASSERT_EQ(run("lane", t).size(), 1u);
  t.nodes[outlier].state.base_health[game::health_slot(game::kEnemy, Lane::Bottom)] = 0.998;
  EXPECT_TRUE(run("lane", t).empty());
  // A health-only outlier listed first is still the one reported.
  const int first = t.nodes[0].children.front();
  t.nodes[outlier].state = kid;
  t.nodes[first].state.base_health[game::health_slot(game::kSelf, Lane::Bottom)] = 0.95;
  const auto g = run("lane", t);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].nodes, (std::vector<int>{first, t.nodes[0].children[1]}));
}

TEST(InfeasibleDetector, UnitsNeedABuilding) {
  SearchTree t;
  AbstractState root = healthy();
  root.buildings[1][0][2] = 1;
  add_node(t, -1, root);
  AbstractState ok = root;
  ok.unit_grid[1][2][1] = 4;
  add_node(t, 0, ok);
  AbstractState bad = ok;
  bad.unit_grid[1][2][game::cell_index(Lane::Bottom, 2)] = 3;
  bad.unit_grid[0][1][0] = 1;
  add_node(t, 0, bad);
  const auto f = run("infeasible", t);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].nodes, (std::vector<int>{2}));
  EXPECT_EQ(f[0].severity, 4.0);
}

TEST(TerminalDetector, ExpandingOrMisvaluedDeadBases) {
  SearchTree t;
  add_node(t, -1, healthy());
  AbstractState dead = healthy();
  dead.base_health[game::health_slot(game::kEnemy, Lane::Top)] = 0.005;
  const int fine = add_node(t, 0, dead);
  t.nodes[fine].value = OutcomeVector::one_hot(Outcome::SelfDestroysTop);
  const int misvalued = add_node(t, 0, dead);
  t.nodes[misvalued].value = OutcomeVector::one_hot(Outcome::EnemyTimeout);
  const int expanding = add_node(t, 0, dead);
  t.nodes[expanding].value = OutcomeVector::one_hot(Outcome::SelfDestroysTop);
  add_node(t, expanding, dead);
  AbstractState near = healthy();
  near.base_health[0] = 0.02;
  add_node(t, 0, near);
  std::set<int> flagged;
  for (const auto& f : run("terminal", t)) flagged.insert(f.nodes[0]);
  // The grandchild is dead too and keeps the favourable value.
  EXPECT_EQ(flagged, (std::set<int>{misvalued, expanding}));

  // A tie between a self and an enemy base goes against the observer.
  SearchTree tie;
  AbstractState both = healthy();
  both.base_health = {0.0, 1, 0.0, 1};
  add_node(tie, -1, both);
  tie.nodes[0].value = OutcomeVector::one_hot(Outcome::EnemyDestroysTop);
  EXPECT_TRUE(run("terminal", tie).empty());
  tie.nodes[0].value = OutcomeVector::one_hot(Outcome::SelfDestroysTop);
  EXPECT_EQ(run("terminal", tie).size(), 1u);
}

TEST(BuildingDetector, CountsNeverFall) {
  SearchTree t;
  AbstractState root = healthy();
  root.buildings[0][1][1] = 2;
  root.pylons = {1, 2};
  add_node(t, -1, root);
  AbstractState more = root;
  more.buildings[0][1][1] = 3;
  more.pylons = {2, 2};
  add_node(t, 0, more);
  AbstractState fewer = root;
  fewer.buildings[0][1][1] = 1;
  fewer.pylons = {1, 0};
  add_node(t, 0, fewer);
  const auto f = run("building", t);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].nodes, (std::vector<int>{0, 2}));
  EXPECT_EQ(f[0].severity, 3.0);
}

TEST(EvalDetector, SimilarLeavesDisagreeing) {
  SearchTree t;
  add_node(t, -1, healthy());
  const int a = add_node(t, 0, healthy());
  const int b = add_node(t, 0, healthy());
  AbstractState s = healthy();
  const int x = add_node(t, a, s);
  const int y = add_node(t, b, s);
  s.base_health[3] = 0.98;  // L1 0.02
  const int z = add_node(t, b, s);
  t.nodes[x].value = OutcomeVector::one_hot(Outcome::SelfTimeout);
  t.nodes[y].value = OutcomeVector::one_hot(Outcome::SelfTimeout);
  t.nodes[z].value = OutcomeVector::one_hot(Outcome::EnemyTimeout);
  EXPECT_TRUE(find_detector("eval")->advisory());
  auto pairs = [&](const LintOptions& o) {
    std::set<std::pair<int, int>> out;
    for (const auto& f : run("eval", t, o)) out.insert({f.nodes[0], f.nodes[1]});
    return out;
  };
  EXPECT_EQ(pairs({}), (std::set<std::pair<int, int>>{{x, z}, {y, z}}));
  LintOptions exact;
  exact.tau_state = 0;
  EXPECT_TRUE(pairs(exact).empty());
  t.nodes[y].value = OutcomeVector{{0.4, 0, 0.2, 0, 0, 0}};  // same argmax, L1 0.8
  EXPECT_EQ(pairs(exact), (std::set<std::pair<int, int>>{{x, y}}));
}

TEST(Registry, SelectionAndUnknownIds) {
  EXPECT_EQ(select_detectors("").size(), 6u);
  EXPECT_EQ(select_detectors("all").size(), 6u);
  const auto two = select_detectors("lane,health,lane");
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0]->id(), "lane");
  EXPECT_THROW(select_detectors("health,nope"), std::invalid_argument);
  LintOptions bad;
  bad.tau_outcome = -1;
  EXPECT_THROW(lint_tree(SearchTree{}, all_detectors(), bad), std::invalid_argument);
}

class GroundTruth : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto q = models::QFunction::init(5, 32);
    trees_ = new std::vector<SearchTree>(ground_truth_trees(30, 77, q, GroundTruthOptions{}));
  }
  static void TearDownTestSuite() { delete trees_; }
  static std::vector<SearchTree>* trees_;
};
std::vector<SearchTree>* GroundTruth::trees_ = nullptr;

TEST_F(GroundTruth, RuleDetectorsStayQuiet) {
  ASSERT_EQ(trees_->size(), 30u);
  int deep = 0;
  for (const auto& tree : *trees_) {
    deep += tree.count_at_depth(2);
    for (const auto& d : all_detectors()) {
      if (d->advisory()) continue;
      const auto f = d->run(tree, {});
      EXPECT_TRUE(f.empty()) << d->id() << ": " << (f.empty() ? "" : f[0].message);
    }
  }
  EXPECT_GT(deep, 1000);
}

TEST_F(GroundTruth, InjectedViolationsAreFoundExactly) {
  const auto corpus = build_injection_corpus(*trees_, 3, {});
  // Trees whose leaves all end the game offer no site.
  ASSERT_GE(corpus.manifest.size(), 15u);
  const auto score = score_corpus(corpus, {});
  EXPECT_EQ(score.clean_findings, 0);
  for (const auto& [id, c] : score.classes) {
    EXPECT_GT(c.injected, 0) << id;
    EXPECT_EQ(c.detected, c.injected) << id;
    EXPECT_EQ(c.exact, c.injected) << id;
  }
  EXPECT_EQ(score.recall(), 1.0);
  const auto doc = manifest_to_json(corpus.manifest);
  EXPECT_EQ(doc.size(), corpus.manifest.size());
}

Replay synthetic_replay(const std::vector<double>& best, const std::vector<SearchTree>& trees, bool lost) {
  Replay r;
  r.game_id = "g1";
  r.config_hash = "abc";
  r.seed = 9;
  r.agent = "search";
  r.opponent = "random";
  r.agent_seat = game::Player::Two;
  r.outcome = {lost ? game::Player::One : game::Player::Two,
               lost ? game::WinCondition::P1DestroysBottom : game::WinCondition::P2Timeout};
  r.final_wave = static_cast<int>(best.size());
  for (std::size_t i = 0; i < best.size(); ++i) {
    Decision d;
    d.index = static_cast<int>(i);
    d.state = trees[i].root().state;
    d.agent_action = buy(Lane::Top, 1);
    d.opponent_action = PlayerAction{Lane::Bottom, {0, 0, 1}, 1};
    d.tree = trees[i];
    d.root_table = {{buy(Lane::Top, 1), 0, OutcomeVector{{best[i], 0, 0, 0, 0, 0}}},
                    {PlayerAction{}, 1, OutcomeVector{{best[i] / 2, 0, 0, 0.1, 0, 0}}},
                    {buy(Lane::Bottom, 1), 2, OutcomeVector{{0.1, 0, 0, 0, 0, 0}}}};
    r.decisions.push_back(d);
  }
  return r;
}

TEST(Interest, DropFluctuationCriticality) {
  std::vector<SearchTree> trees(3);
  for (auto& t : trees) add_node(t, -1, healthy());
  const auto scores = interest_scores(synthetic_replay({0.8, 0.3, 0.5}, trees, true));
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_FALSE(scores[0].value_drop);
  EXPECT_NEAR(*scores[1].value_drop, 0.5, 1e-12);
  EXPECT_NEAR(*scores[2].value_drop, -0.2, 1e-12);
  EXPECT_NEAR(scores[0].fluctuation, 0.7, 1e-12);
  EXPECT_NEAR(scores[0].criticality, 0.8 - (0.8 + 0.4 + 0.1) / 3, 1e-12);
  const auto ranked = rank_by_drop(scores);
  EXPECT_EQ(ranked[0].decision, 1);
  EXPECT_EQ(ranked[1].decision, 2);
  EXPECT_EQ(ranked[2].decision, 0);
}

TEST(ReplayDocument, RoundTripWithAndWithoutTrees) {
  std::vector<SearchTree> trees(2);
  for (auto& t : trees) {
    add_node(t, -1, healthy());
    add_node(t, 0, healthy(), buy(Lane::Top, 2), buy(Lane::Bottom, 1));
  }
  const Replay r = synthetic_replay({0.6, 0.2}, trees, true);
  EXPECT_EQ(replay_from_json(replay_to_json(r, true)), r);
  const Replay slim = replay_from_json(replay_to_json(r, false));
  EXPECT_TRUE(slim.decisions[0].tree.nodes.empty());
  EXPECT_EQ(slim.decisions[1].root_table, r.decisions[1].root_table);
  EXPECT_TRUE(slim.agent_lost());
  auto doc = replay_to_json(r, false);
  doc["version"] = 2;
  EXPECT_THROW(replay_from_json(doc), std::runtime_error);
  doc["version"] = 1;
  doc["outcome"]["condition"] = "nobody";
  EXPECT_THROW(replay_from_json(doc), std::runtime_error);
}

TEST_F(GroundTruth, ScanCountsMatchTheManifest) {
  auto corpus = build_injection_corpus(*trees_, 11, {});
  ASSERT_GE(corpus.manifest.size(), 10u);
  corpus.manifest.resize(10);
  std::vector<Replay> replays;
  for (int g = 0; g < 2; ++g) {
    std::vector<SearchTree> trees(corpus.injected.begin() + g * 5, corpus.injected.begin() + g * 5 + 5);
    Replay r = synthetic_replay(std::vector<double>(5, 0.5), trees, g == 0);
    r.game_id = "g" + std::to_string(g);
    replays.push_back(r);
  }
  std::map<std::string, int> expected;
  for (const char* id : kInjectableDetectors) expected[id] = 0;
  for (const auto& m : corpus.manifest) ++expected[m.detector];
  auto rules = select_detectors("health,lane,infeasible,terminal,building");
  const auto scan = scan_library(replays, rules, {});
  EXPECT_EQ(scan.totals, expected);
  EXPECT_EQ(scan.losing_games, 1);
  const bool last_is_health = corpus.manifest[4].detector == "health";
  EXPECT_EQ(scan.games[0].final_health_rise, last_is_health);
  EXPECT_EQ(scan.losing_with_final_rise, last_is_health ? 1 : 0);
  int hist = 0;
  for (const auto& [_, h] : scan.histograms) {
    for (int c : h) hist += c;
  }
  EXPECT_EQ(hist, 10);
  const auto doc = scan_to_json(scan);
  EXPECT_EQ(doc["reports"].size(), 10u);
  EXPECT_EQ(doc["schema"], kScanSchema);
}

}  // namespace
}  // namespace tow::lint
