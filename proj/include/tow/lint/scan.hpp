#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tow/lint/detectors.hpp"
#include "tow/lint/replay.hpp"

namespace tow::lint {

inline constexpr const char* kScanSchema = "tow.lint";
inline constexpr int kScanSchemaVersion = 1;

struct FlawReport {
  std::string detector;
  std::string game_id;
  int decision = 0;
  std::vector<int> nodes;
  double severity = 0;
  bool severe = false;
  bool advisory = false;
  std::string message;

  friend bool operator==(const FlawReport&, const FlawReport&) = default;
};

using DetectorSet = std::vector<std::shared_ptr<const Detector>>;

std::vector<FlawReport> lint_tree(const search::SearchTree& tree, const DetectorSet& detectors,
                                  const LintOptions& options, const std::string& game_id = "", int decision = 0);
std::vector<FlawReport> lint_replay(const Replay& replay, const DetectorSet& detectors, const LintOptions& options);

// Upper bin edges for severity histograms; the last bin is open.
inline constexpr std::array<double, 4> kSeverityEdges{0.01, 0.05, 0.10, 0.25};
using SeverityHistogram = std::array<int, kSeverityEdges.size() + 1>;

struct GameSummary {
  std::string game_id;
  bool agent_lost = false;
  int decisions = 0;
  std::map<std::string, int> counts;  // per detector
  int severe = 0;
  // The last decision before the game ended: did the tree expect one of the
  // agent's or the enemy's bases to heal? Only meaningful for lost games.
  bool final_health_rise = false;
  bool final_health_rise_severe = false;
  double final_health_rise_max = 0;
};

struct ScanReport {
  std::vector<FlawReport> reports;
  std::vector<GameSummary> games;
  std::map<std::string, int> totals;
  std::map<std::string, SeverityHistogram> histograms;
  int losing_games = 0;
  int losing_with_final_rise = 0;
  int losing_with_severe_final_rise = 0;
};

ScanReport scan_library(const std::vector<Replay>& replays, const DetectorSet& detectors,
                        const LintOptions& options);

nlohmann::json report_to_json(const FlawReport& r);
nlohmann::json reports_to_json(const std::vector<FlawReport>& reports);
nlohmann::json scan_to_json(const ScanReport& scan);

}  // namespace tow::lint
