#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tow/game/config.hpp"
#include "tow/search/tree.hpp"

namespace tow::lint {

struct LintOptions {
  double health_tolerance = 0.005;   // rises at or below this are noise
  double severe_rise = 0.10;         // a rise above this is severe
  double terminal_threshold = search::kTerminalThreshold;
  double tau_state = 0.05;           // L1 over normalized state features
  double tau_outcome = 0.5;          // L1 over outcome vectors
  game::GameConfig config;           // scales for the state features

  void validate() const;  // throws std::invalid_argument
};

// One finding inside a tree. `severity` is detector specific: the size of a
// health rise, a count of offending units, and so on.
struct Finding {
  std::vector<int> nodes;
  double severity = 0;
  bool severe = false;
  std::string message;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string id() const = 0;
  virtual std::string description() const = 0;
  // Heuristic detectors flag candidates for a human, not rule violations.
  virtual bool advisory() const { return false; }
  virtual std::vector<Finding> run(const search::SearchTree& tree, const LintOptions& options) const = 0;
};

// Registered detectors in reporting order:
// health, lane, infeasible, terminal, building, eval.
const std::vector<std::shared_ptr<const Detector>>& all_detectors();
// Throws std::invalid_argument on an unknown id.
std::shared_ptr<const Detector> find_detector(const std::string& id);
// Comma separated ids; empty or "all" selects every detector.
std::vector<std::shared_ptr<const Detector>> select_detectors(const std::string& ids);

// Lanes whose contents an edge's action pair leaves untouched by purchases.
bool lane_untouched(const search::TreeNode& node, game::Lane lane);

}  // namespace tow::lint
