#pragma once

#include <optional>
#include <vector>

#include "tow/lint/replay.hpp"

namespace tow::lint {

// Heuristics for picking decision points worth a closer look.
struct InterestScore {
  int decision = 0;
  std::optional<double> value_drop;  // best_value(i-1) - best_value(i); absent at 0
  double fluctuation = 0;            // max - min over the root table
  double criticality = 0;            // max - mean over the root table
};

InterestScore table_scores(int decision, const std::vector<search::RootEntry>& table);
std::vector<InterestScore> interest_scores(const Replay& replay);

// Decisions ordered by value drop descending (decision 0 last), ties by index.
std::vector<InterestScore> rank_by_drop(std::vector<InterestScore> scores);

}  // namespace tow::lint
