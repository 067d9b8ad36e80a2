#include "tow/lint/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tow/models/features.hpp"

namespace tow::lint {

using game::Lane;
using search::SearchTree;
using search::TreeNode;

void LintOptions::validate() const {
  if (!(health_tolerance >= 0) || !(severe_rise >= 0) || !(terminal_threshold >= 0) || !(tau_state >= 0) ||
      !(tau_outcome >= 0)) {
    throw std::invalid_argument("LintOptions: thresholds must be non-negative");
  }
}

bool lane_untouched(const TreeNode& node, Lane lane) {
  return !node.friendly.touches(lane) && !node.enemy.touches(lane);
}

namespace {

const char* side_name(int side) { return side == game::kSelf ? "self" : "enemy"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

double lowest_health(const game::AbstractState& s) {
  return *std::min_element(s.base_health.begin(), s.base_health.end());
}

class HealthIncrease final : public Detector {
 public:
  std::string id() const override { return "health"; }
  std::string description() const override { return "a predicted base health rises along an edge"; }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions& o) const override {
    std::vector<Finding> out;
    for (const auto& n : tree.nodes) {
      if (n.parent < 0) continue;
      const auto& before = tree.nodes[n.parent].state;
      double worst = 0;
      std::ostringstream msg;
      for (int side = 0; side < 2; ++side) {
        for (Lane lane : game::kLanes) {
          const double from = before.health(side, lane);
          const double to = n.state.health(side, lane);
          if (to - from <= o.health_tolerance) continue;
          if (worst > 0) msg << "; ";
          msg << side_name(side) << ' ' << game::to_string(lane) << " base health rises " << fmt(from) << " -> "
              << fmt(to);
          worst = std::max(worst, to - from);
        }
      }
      if (worst > 0) out.push_back({{n.parent, n.id}, worst, worst > o.severe_rise, msg.str()});
    }
    return out;
  }
};

// Everything a wave can change inside one lane.
struct LaneContents {
  std::vector<int> counts;  // buildings then grid cells, both sides
  std::array<double, 2> health{};
};

LaneContents lane_contents(const game::AbstractState& s, Lane lane) {
  LaneContents c;
  for (int side = 0; side < 2; ++side) {
    for (int t = 0; t < game::kNumUnitTypes; ++t) {
      c.counts.push_back(s.buildings[side][game::index(lane)][t]);
      for (int cell = 0; cell < game::kCellsPerLane; ++cell) {
        c.counts.push_back(s.unit_grid[side][t][game::cell_index(lane, cell)]);
      }
    }
    c.health[side] = s.health(side, lane);
  }
  return c;
}

class LaneIndependence final : public Detector {
 public:
  std::string id() const override { return "lane"; }
  std::string description() const override {
    return "siblings that leave a lane alone disagree about that lane";
  }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions& o) const override {
    std::vector<Finding> out;
    for (const auto& parent : tree.nodes) {
      for (Lane lane : game::kLanes) check(tree, parent, lane, o, out);
    }
    return out;
  }

 private:
  // Members are compared against the member that agrees with the most
  // siblings (ties to the first); one finding per outlier.
  static void check(const SearchTree& tree, const TreeNode& parent, Lane lane, const LintOptions& o,
                    std::vector<Finding>& out) {
    std::vector<const TreeNode*> members;
    for (int id : parent.children) {
      const auto& c = tree.nodes[id];
      if (c.terminal || lowest_health(c.state) <= o.terminal_threshold) continue;  // the wave stopped early
      if (lane_untouched(c, lane)) members.push_back(&c);
    }
    if (members.size() < 2) return;
    std::vector<LaneContents> contents;
    for (const auto* m : members) contents.push_back(lane_contents(m->state, lane));
    const auto compare = [&](std::size_t a, std::size_t b) {
      double diff = 0;
      for (std::size_t k = 0; k < contents[a].counts.size(); ++k) {
        diff += std::abs(contents[a].counts[k] - contents[b].counts[k]);
      }
      double health_gap = 0;
      for (int side = 0; side < 2; ++side) {
        health_gap = std::max(health_gap, std::abs(contents[a].health[side] - contents[b].health[side]));
      }
      return std::pair{diff, health_gap};
    };
    const auto agree = [&](std::size_t a, std::size_t b) {
      const auto [diff, gap] = compare(a, b);
      return diff == 0 && gap <= o.health_tolerance;
    };
    std::vector<int> support(members.size(), 0);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < members.size(); ++j) support[i] += agree(i, j) ? 1 : 0;
    }
    const std::size_t ref = std::max_element(support.begin(), support.end()) - support.begin();
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i == ref) continue;
      const auto [diff, health_gap] = compare(i, ref);
      if (diff == 0 && health_gap <= o.health_tolerance) continue;
      std::ostringstream msg;
      msg << game::to_string(lane) << " lane differs from sibling " << members[ref]->id
          << " although neither action pair buys there (" << diff << " counts, health gap " << fmt(health_gap)
          << ")";
      out.push_back({{members[i]->id, members[ref]->id}, diff + health_gap, false, msg.str()});
    }
  }
};

class InfeasibleUnits final : public Detector {
 public:
  std::string id() const override { return "infeasible"; }
  std::string description() const override { return "units of a type appear in a lane without a building"; }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions&) const override {
    std::vector<Finding> out;
    for (const auto& n : tree.nodes) {
      if (n.parent < 0) continue;
      int units = 0;
      std::ostringstream msg;
      for (int side = 0; side < 2; ++side) {
        for (Lane lane : game::kLanes) {
          for (auto type : game::kUnitTypes) {
            const int k = n.state.lane_units(side, type, lane);
            if (k == 0 || n.state.buildings[side][game::index(lane)][game::index(type)] > 0) continue;
            if (units > 0) msg << "; ";
            msg << k << ' ' << side_name(side) << ' ' << game::to_string(type) << " in " << game::to_string(lane)
                << " with no building";
            units += k;
          }
        }
      }
      if (units > 0) out.push_back({{n.id}, static_cast<double>(units), false, msg.str()});
    }
    return out;
  }
};

class MissingTerminal final : public Detector {
 public:
  std::string id() const override { return "terminal"; }
  std::string description() const override {
    return "a state with a destroyed base keeps expanding or does not favour the survivor";
  }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions& o) const override {
    std::vector<Finding> out;
    for (const auto& n : tree.nodes) {
      const auto& h = n.state.base_health;
      const auto lowest = std::min_element(h.begin(), h.end());
      if (*lowest > o.terminal_threshold) continue;
      // Ties go against the observer: the first slot is a self base.
      const bool self_lost = (lowest - h.begin()) < game::kNumLanes;
      const double winner = self_lost ? n.value.enemy_value() : n.value.agent_value();
      const double loser = self_lost ? n.value.agent_value() : n.value.enemy_value();
      const bool expands = !n.children.empty();
      const bool wrong_value = !n.valued || winner <= loser;
      if (!expands && !wrong_value) continue;
      std::ostringstream msg;
      msg << (self_lost ? "self" : "enemy") << " base at " << fmt(*lowest);
      if (expands) msg << " but the node has " << n.children.size() << " children";
      if (wrong_value) msg << (expands ? " and" : " but") << " the value favours the losing side";
      out.push_back({{n.id}, 1.0, false, msg.str()});
    }
    return out;
  }
};

class BuildingDecrease final : public Detector {
 public:
  std::string id() const override { return "building"; }
  std::string description() const override { return "a building or pylon count falls along an edge"; }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions&) const override {
    std::vector<Finding> out;
    for (const auto& n : tree.nodes) {
      if (n.parent < 0) continue;
      const auto& before = tree.nodes[n.parent].state;
      int lost = 0;
      std::ostringstream msg;
      auto note = [&](int from, int to, const std::string& what) {
        if (to >= from) return;
        if (lost > 0) msg << "; ";
        msg << what << ' ' << from << " -> " << to;
        lost += from - to;
      };
      for (int side = 0; side < 2; ++side) {
        for (Lane lane : game::kLanes) {
          for (auto type : game::kUnitTypes) {
            note(before.buildings[side][game::index(lane)][game::index(type)],
                 n.state.buildings[side][game::index(lane)][game::index(type)],
                 std::string(side_name(side)) + ' ' + std::string(game::to_string(lane)) + ' ' +
                     std::string(game::to_string(type)) + " buildings");
          }
        }
        note(before.pylons[side], n.state.pylons[side], std::string(side_name(side)) + " pylons");
      }
      if (lost > 0) out.push_back({{n.parent, n.id}, static_cast<double>(lost), false, msg.str()});
    }
    return out;
  }
};

class EvalInconsistency final : public Detector {
 public:
  std::string id() const override { return "eval"; }
  std::string description() const override {
    return "near-identical leaves under one grandparent get very different values";
  }
  bool advisory() const override { return true; }
  std::vector<Finding> run(const SearchTree& tree, const LintOptions& o) const override {
    std::map<int, std::vector<int>> by_grandparent;
    for (const auto& n : tree.nodes) {
      if (!n.children.empty() || n.parent < 0) continue;
      const int gp = tree.nodes[n.parent].parent;
      if (gp >= 0) by_grandparent[gp].push_back(n.id);
    }
    std::vector<Finding> out;
    for (const auto& [gp, leaves] : by_grandparent) {
      std::vector<Eigen::VectorXd> enc;
      for (int id : leaves) enc.push_back(models::encode_state(tree.nodes[id].state, o.config));
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
          double dist = 0;
          for (std::size_t k = 0; k < static_cast<std::size_t>(enc[i].size()) && dist <= o.tau_state; ++k) dist += std::abs(enc[i](k) - enc[j](k));
          if (dist > o.tau_state) continue;
          const auto& a = tree.nodes[leaves[i]].value;
          const auto& b = tree.nodes[leaves[j]].value;
          double gap = 0;
          for (int k = 0; k < models::kOutcomeSize; ++k) gap += std::abs(a.p[k] - b.p[k]);
          const bool flips = a.argmax() != b.argmax();
          if (!flips && gap <= o.tau_outcome) continue;
          std::ostringstream msg;
          msg << "leaves " << leaves[i] << " and " << leaves[j] << " differ by " << fmt(dist)
              << " in state but " << fmt(gap) << " in value";
          if (flips) msg << " (" << models::to_string(a.argmax()) << " vs " << models::to_string(b.argmax()) << ")";
          out.push_back({{leaves[i], leaves[j]}, gap, false, msg.str()});
        }
      }
    }
    return out;
  }
};

}  // namespace

const std::vector<std::shared_ptr<const Detector>>& all_detectors() {
  static const std::vector<std::shared_ptr<const Detector>> detectors{
      std::make_shared<HealthIncrease>(),  std::make_shared<LaneIndependence>(),
      std::make_shared<InfeasibleUnits>(), std::make_shared<MissingTerminal>(),
      std::make_shared<BuildingDecrease>(), std::make_shared<EvalInconsistency>()};
  return detectors;
}

std::shared_ptr<const Detector> find_detector(const std::string& id) {
  for (const auto& d : all_detectors()) {
    if (d->id() == id) return d;
  }
  throw std::invalid_argument("unknown detector '" + id + "'");
}

std::vector<std::shared_ptr<const Detector>> select_detectors(const std::string& ids) {
  if (ids.empty() || ids == "all") return all_detectors();
  std::vector<std::shared_ptr<const Detector>> out;
  std::stringstream in(ids);
  std::string id;
  while (std::getline(in, id, ',')) {
    auto d = find_detector(id);
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace tow::lint
