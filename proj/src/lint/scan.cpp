#include "tow/lint/scan.hpp"

#include <algorithm>

namespace tow::lint {

std::vector<FlawReport> lint_tree(const search::SearchTree& tree, const DetectorSet& detectors,
                                  const LintOptions& options, const std::string& game_id, int decision) {
  options.validate();
  std::vector<FlawReport> out;
  if (tree.nodes.empty()) return out;
  for (const auto& d : detectors) {
    for (auto& f : d->run(tree, options)) {
      out.push_back({d->id(), game_id, decision, std::move(f.nodes), f.severity, f.severe, d->advisory(),
                     std::move(f.message)});
    }
  }
  return out;
}

std::vector<FlawReport> lint_replay(const Replay& replay, const DetectorSet& detectors, const LintOptions& options) {
  std::vector<FlawReport> out;
  for (const auto& d : replay.decisions) {
    auto part = lint_tree(d.tree, detectors, options, replay.game_id, d.index);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

namespace {

std::size_t severity_bin(double s) {
  return static_cast<std::size_t>(std::upper_bound(kSeverityEdges.begin(), kSeverityEdges.end(), s) -
                                  kSeverityEdges.begin());
}

}  // namespace

ScanReport scan_library(const std::vector<Replay>& replays, const DetectorSet& detectors,
                        const LintOptions& options) {
  ScanReport scan;
  for (const auto& d : detectors) {
    scan.totals[d->id()] = 0;
    scan.histograms[d->id()] = {};
  }
  for (const auto& replay : replays) {
    GameSummary g;
    g.game_id = replay.game_id;
    g.agent_lost = replay.agent_lost();
    g.decisions = static_cast<int>(replay.decisions.size());
    for (const auto& d : detectors) g.counts[d->id()] = 0;
    const int last = replay.decisions.empty() ? -1 : replay.decisions.back().index;
    for (auto& r : lint_replay(replay, detectors, options)) {
      ++g.counts[r.detector];
      ++scan.totals[r.detector];
      ++scan.histograms[r.detector][severity_bin(r.severity)];
      if (r.severe) ++g.severe;
      if (r.detector == "health" && r.decision == last) {
        g.final_health_rise = true;
        g.final_health_rise_severe = g.final_health_rise_severe || r.severe;
        g.final_health_rise_max = std::max(g.final_health_rise_max, r.severity);
      }
      scan.reports.push_back(std::move(r));
    }
    if (g.agent_lost) {
      ++scan.losing_games;
      if (g.final_health_rise) ++scan.losing_with_final_rise;
      if (g.final_health_rise_severe) ++scan.losing_with_severe_final_rise;
    }
    scan.games.push_back(std::move(g));
  }
  return scan;
}

nlohmann::json report_to_json(const FlawReport& r) {
  return {{"detector", r.detector}, {"game_id", r.game_id}, {"decision", r.decision}, {"nodes", r.nodes},
          {"severity", r.severity}, {"severe", r.severe},   {"advisory", r.advisory}, {"message", r.message}};
}

nlohmann::json reports_to_json(const std::vector<FlawReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(report_to_json(r));
  return out;
}

nlohmann::json scan_to_json(const ScanReport& scan) {
  nlohmann::json games = nlohmann::json::array();
  for (const auto& g : scan.games) {
    games.push_back({{"game_id", g.game_id},
                     {"agent_lost", g.agent_lost},
                     {"decisions", g.decisions},
                     {"counts", g.counts},
                     {"severe", g.severe},
                     {"final_health_rise", g.final_health_rise},
                     {"final_health_rise_severe", g.final_health_rise_severe},
                     {"final_health_rise_max", g.final_health_rise_max}});
  }
  return {{"schema", kScanSchema},
          {"version", kScanSchemaVersion},
          {"severity_edges", kSeverityEdges},
          {"totals", scan.totals},
          {"histograms", scan.histograms},
          {"losing_games", scan.losing_games},
          {"losing_with_final_rise", scan.losing_with_final_rise},
          {"losing_with_severe_final_rise", scan.losing_with_severe_final_rise},
          {"games", std::move(games)},
          {"reports", reports_to_json(scan.reports)}};
}

}  // namespace tow::lint
