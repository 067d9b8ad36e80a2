#include "tow/lint/interest.hpp"

#include <algorithm>

namespace tow::lint {

namespace {

double best_value(const std::vector<search::RootEntry>& table) {
  return table.empty() ? 0.0 : table.front().value.agent_value();
}

}  // namespace

InterestScore table_scores(int decision, const std::vector<search::RootEntry>& table) {
  InterestScore s;
  s.decision = decision;
  if (table.empty()) return s;
  double hi = table.front().value.agent_value();
  double lo = hi;
  double sum = 0;
  for (const auto& e : table) {
    const double v = e.value.agent_value();
    hi = std::max(hi, v);
    lo = std::min(lo, v);
    sum += v;
  }
  s.fluctuation = hi - lo;
  s.criticality = hi - sum / static_cast<double>(table.size());
  return s;
}

std::vector<InterestScore> interest_scores(const Replay& replay) {
  std::vector<InterestScore> out;
  for (std::size_t i = 0; i < replay.decisions.size(); ++i) {
    InterestScore s = table_scores(static_cast<int>(i), replay.decisions[i].root_table);
    if (i > 0) s.value_drop = best_value(replay.decisions[i - 1].root_table) - best_value(replay.decisions[i].root_table);
    out.push_back(s);
  }
  return out;
}

std::vector<InterestScore> rank_by_drop(std::vector<InterestScore> scores) {
  std::stable_sort(scores.begin(), scores.end(), [](const InterestScore& a, const InterestScore& b) {
    if (a.value_drop.has_value() != b.value_drop.has_value()) return a.value_drop.has_value();
    if (a.value_drop && *a.value_drop != *b.value_drop) return *a.value_drop > *b.value_drop;
    return a.decision < b.decision;
  });
  return scores;
}

}  // namespace tow::lint
