#include "tow/lint/injection.hpp"

#include <algorithm>

#include "tow/game/abstraction.hpp"
#include "tow/search/build.hpp"
#include "tow/search/dynamics.hpp"
#include "tow/train/agents.hpp"

namespace tow::lint {

using game::Lane;
using search::SearchTree;
using search::TreeNode;

std::vector<SearchTree> ground_truth_trees(int count, std::uint64_t seed, const models::QFunction& q,
                                           const GroundTruthOptions& options) {
  const auto& cfg = options.config;
  const train::RandomPolicy random(cfg);
  game::SplitMix64 rng{seed};
  std::vector<SearchTree> trees;
  while (static_cast<int>(trees.size()) < count) {
    const auto game = train::play_game(random, random, rng.next(), cfg, rng);
    if (game.steps.empty()) continue;
    const auto& step = game.steps[rng.next() % game.steps.size()];
    const auto root = game::abstract(step.before, game::Player::One, cfg);
    const int enemy_currency = step.before.player(game::Player::Two).currency;
    if (search::is_terminal_state(root, options.params.terminal_threshold, cfg)) continue;
    const search::SimulatorDynamics dynamics(cfg, rng.next());
    const search::SearchContext ctx{q, dynamics, search::legal_action_source(cfg, options.candidate_limit), cfg};
    trees.push_back(search::build_tree(root, enemy_currency, ctx, options.params));
  }
  return trees;
}

namespace {

std::size_t pick(std::size_t n, game::SplitMix64& rng) { return static_cast<std::size_t>(rng.next() % n); }

std::vector<Lane> touched_lanes(const TreeNode& n) {
  std::vector<Lane> out;
  for (Lane l : game::kLanes) {
    if (!lane_untouched(n, l)) out.push_back(l);
  }
  return out;
}

// Childless nodes with every base above the terminal threshold.
std::vector<int> quiet_leaves(const SearchTree& tree, const LintOptions& o) {
  std::vector<int> out;
  for (const auto& n : tree.nodes) {
    if (n.parent < 0 || !n.children.empty() || n.terminal) continue;
    const double lowest = *std::min_element(n.state.base_health.begin(), n.state.base_health.end());
    if (lowest > o.terminal_threshold) out.push_back(n.id);
  }
  return out;
}

struct Site {
  int node;
  int side;
  Lane lane;
  int type = 0;
};

template <class F>
std::optional<Site> choose(const std::vector<Site>& sites, game::SplitMix64& rng, F&& apply) {
  if (sites.empty()) return std::nullopt;
  const Site s = sites[pick(sites.size(), rng)];
  apply(s);
  return s;
}

std::optional<Injection> inject_health(SearchTree& tree, game::SplitMix64& rng, const LintOptions& o) {
  std::vector<Site> sites;
  for (int id : quiet_leaves(tree, o)) {
    const auto& parent = tree.nodes[tree.nodes[id].parent].state;
    for (Lane l : touched_lanes(tree.nodes[id])) {
      for (int side = 0; side < 2; ++side) {
        if (parent.health(side, l) <= 0.98 - o.health_tolerance) sites.push_back({id, side, l});
      }
    }
  }
  const auto s = choose(sites, rng, [&](const Site& s) {
    auto& n = tree.nodes[s.node];
    const double from = tree.nodes[n.parent].state.health(s.side, s.lane);
    const double room = std::min(0.3, 1.0 - from);
    const double rise = std::max(0.02 + o.health_tolerance, rng.uniform() * room);
    n.state.base_health[game::health_slot(s.side, s.lane)] = std::min(1.0, from + rise);
  });
  if (!s) return std::nullopt;
  return Injection{0, "health", {tree.nodes[s->node].parent, s->node}};
}

// Siblings compared by the lane detector for `lane` under `parent`.
std::vector<int> lane_group(const SearchTree& tree, int parent, Lane lane, const LintOptions& o) {
  std::vector<int> out;
  for (int sib : tree.nodes[parent].children) {
    const auto& c = tree.nodes[sib];
    const double lowest = *std::min_element(c.state.base_health.begin(), c.state.base_health.end());
    if (!c.terminal && lowest > o.terminal_threshold && lane_untouched(c, lane)) out.push_back(sib);
  }
  return out;
}

std::optional<Injection> inject_lane(SearchTree& tree, game::SplitMix64& rng, const LintOptions& o) {
  std::vector<Site> sites;
  for (int id : quiet_leaves(tree, o)) {
    const auto& n = tree.nodes[id];
    for (Lane l : game::kLanes) {
      if (!lane_untouched(n, l) || lane_group(tree, n.parent, l, o).size() < 3) continue;
      for (int side = 0; side < 2; ++side) {
        if (n.state.health(side, l) > o.terminal_threshold + 0.05 + o.health_tolerance) sites.push_back({id, side, l});
      }
    }
  }
  const auto s = choose(sites, rng, [&](const Site& s) {
    tree.nodes[s.node].state.base_health[game::health_slot(s.side, s.lane)] -= 0.03 + o.health_tolerance;
  });
  if (!s) return std::nullopt;
  // The detector cites the first untouched sibling as the reference.
  const auto group = lane_group(tree, tree.nodes[s->node].parent, s->lane, o);
  const int reference = group[0] == s->node ? group[1] : group[0];
  return Injection{0, "lane", {s->node, reference}};
}

std::optional<Injection> inject_infeasible(SearchTree& tree, game::SplitMix64& rng, const LintOptions& o) {
  std::vector<Site> sites;
  for (int id : quiet_leaves(tree, o)) {
    const auto& st = tree.nodes[id].state;
    for (Lane l : touched_lanes(tree.nodes[id])) {
      for (int side = 0; side < 2; ++side) {
        for (int t = 0; t < game::kNumUnitTypes; ++t) {
          if (st.buildings[side][game::index(l)][t] == 0) sites.push_back({id, side, l, t});
        }
      }
    }
  }
  const auto s = choose(sites, rng, [&](const Site& s) {
    const int cell = game::cell_index(s.lane, static_cast<int>(pick(game::kCellsPerLane, rng)));
    tree.nodes[s.node].state.unit_grid[s.side][s.type][cell] += 2;
  });
  if (!s) return std::nullopt;
  return Injection{0, "infeasible", {s->node}};
}

std::optional<Injection> inject_terminal(SearchTree& tree, game::SplitMix64& rng, const LintOptions& o) {
  std::vector<Site> sites;
  for (int id : quiet_leaves(tree, o)) {
    for (Lane l : touched_lanes(tree.nodes[id])) {
      for (int side = 0; side < 2; ++side) sites.push_back({id, side, l});
    }
  }
  const auto s = choose(sites, rng, [&](const Site& s) {
    auto& n = tree.nodes[s.node];
    n.state.base_health[game::health_slot(s.side, s.lane)] = 0.0;
    // The value still backs the side that just lost a base.
    n.value = models::OutcomeVector::one_hot(s.side == game::kSelf ? models::Outcome::SelfTimeout
                                                                   : models::Outcome::EnemyTimeout);
    n.valued = true;
  });
  if (!s) return std::nullopt;
  return Injection{0, "terminal", {s->node}};
}

std::optional<Injection> inject_building(SearchTree& tree, game::SplitMix64& rng, const LintOptions& o) {
  constexpr int kPylon = -1;
  std::vector<Site> sites;
  for (int id : quiet_leaves(tree, o)) {
    const auto& n = tree.nodes[id];
    const auto& parent = tree.nodes[n.parent].state;
    for (int side = 0; side < 2; ++side) {
      if (parent.pylons[side] > 0) sites.push_back({id, side, Lane::Top, kPylon});
    }
    // A building may only go where the lane is already being bought into and
    // where no orphaned units would be left behind.
    for (Lane l : touched_lanes(n)) {
      for (int side = 0; side < 2; ++side) {
        for (int t = 0; t < game::kNumUnitTypes; ++t) {
          const int before = parent.buildings[side][game::index(l)][t];
          if (before == 0) continue;
          if (before == 1 && n.state.lane_units(side, game::kUnitTypes[t], l) > 0) continue;
          sites.push_back({id, side, l, t});
        }
      }
    }
  }
  const auto s = choose(sites, rng, [&](const Site& s) {
    auto& n = tree.nodes[s.node];
    const auto& parent = tree.nodes[n.parent].state;
    if (s.type == kPylon) {
      n.state.pylons[s.side] = parent.pylons[s.side] - 1;
    } else {
      n.state.buildings[s.side][game::index(s.lane)][s.type] = parent.buildings[s.side][game::index(s.lane)][s.type] - 1;
    }
  });
  if (!s) return std::nullopt;
  return Injection{0, "building", {tree.nodes[s->node].parent, s->node}};
}

}  // namespace

std::optional<Injection> inject(SearchTree& tree, const std::string& detector, game::SplitMix64& rng,
                                const LintOptions& options) {
  if (detector == "health") return inject_health(tree, rng, options);
  if (detector == "lane") return inject_lane(tree, rng, options);
  if (detector == "infeasible") return inject_infeasible(tree, rng, options);
  if (detector == "terminal") return inject_terminal(tree, rng, options);
  if (detector == "building") return inject_building(tree, rng, options);
  throw std::invalid_argument("no injection for detector '" + detector + "'");
}

InjectionCorpus build_injection_corpus(std::vector<SearchTree> clean, std::uint64_t seed, const LintOptions& options) {
  InjectionCorpus corpus;
  game::SplitMix64 rng{seed};
  for (std::size_t i = 0; i < clean.size(); ++i) {
    for (std::size_t k = 0; k < kInjectableDetectors.size(); ++k) {
      SearchTree copy = clean[i];
      auto inj = inject(copy, kInjectableDetectors[(i + k) % kInjectableDetectors.size()], rng, options);
      if (!inj) continue;
      inj->tree = static_cast<int>(i);
      corpus.injected.push_back(std::move(copy));
      corpus.manifest.push_back(std::move(*inj));
      break;
    }
  }
  corpus.clean = std::move(clean);
  return corpus;
}

double CorpusScore::recall() const {
  int injected = 0;
  int detected = 0;
  for (const auto& [_, c] : classes) {
    injected += c.injected;
    detected += c.detected;
  }
  return injected == 0 ? 0.0 : static_cast<double>(detected) / injected;
}

CorpusScore score_corpus(const InjectionCorpus& corpus, const LintOptions& options) {
  std::vector<std::shared_ptr<const Detector>> rules;
  for (const auto& d : all_detectors()) {
    if (!d->advisory()) rules.push_back(d);
  }
  CorpusScore score;
  for (const char* id : kInjectableDetectors) score.classes[id] = {};
  for (const auto& tree : corpus.clean) {
    ++score.clean_trees;
    for (const auto& d : rules) score.clean_findings += static_cast<int>(d->run(tree, options).size());
  }
  for (std::size_t i = 0; i < corpus.manifest.size(); ++i) {
    const auto& inj = corpus.manifest[i];
    auto& cls = score.classes[inj.detector];
    ++cls.injected;
    bool found = false;
    int others = 0;
    for (const auto& d : rules) {
      for (const auto& f : d->run(corpus.injected[i], options)) {
        if (d->id() == inj.detector && f.nodes == inj.nodes) {
          found = true;
        } else {
          ++others;
        }
      }
    }
    if (found) ++cls.detected;
    if (found && others == 0) ++cls.exact;
  }
  return score;
}

nlohmann::json manifest_to_json(const std::vector<Injection>& manifest) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : manifest) out.push_back({{"tree", m.tree}, {"detector", m.detector}, {"nodes", m.nodes}});
  return out;
}

}  // namespace tow::lint
