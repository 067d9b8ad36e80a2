#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tow/game/rng.hpp"
#include "tow/lint/detectors.hpp"
#include "tow/models/q_function.hpp"
#include "tow/search/tree.hpp"

namespace tow::lint {

// Trees grown with the simulator as dynamics: every rule holds by
// construction. Roots come from random games at random waves.
struct GroundTruthOptions {
  search::SearchParams params{2, {6, 3}, {4, 2}};
  std::size_t candidate_limit = 48;
  game::GameConfig config;
};

std::vector<search::SearchTree> ground_truth_trees(int count, std::uint64_t seed, const models::QFunction& q,
                                                   const GroundTruthOptions& options);

// The detector classes an injection can target.
inline constexpr std::array<const char*, 5> kInjectableDetectors{"health", "lane", "infeasible", "terminal",
                                                                 "building"};

// One planted violation: the only finding `detector` should make on the
// injected tree, with exactly these node ids.
struct Injection {
  int tree = 0;
  std::string detector;
  std::vector<int> nodes;

  friend bool operator==(const Injection&, const Injection&) = default;
};

// Plants one violation of `detector` in `tree`, touching only childless
// nodes so no other rule fires. Returns nullopt when the tree offers no site.
std::optional<Injection> inject(search::SearchTree& tree, const std::string& detector, game::SplitMix64& rng,
                                const LintOptions& options);

struct InjectionCorpus {
  std::vector<search::SearchTree> clean;
  std::vector<search::SearchTree> injected;  // one per entry of manifest
  std::vector<Injection> manifest;
};

// Injects into a copy of every clean tree, cycling through the classes and
// moving to the next class when a tree has no site for the current one.
InjectionCorpus build_injection_corpus(std::vector<search::SearchTree> clean, std::uint64_t seed,
                                       const LintOptions& options);

struct ClassScore {
  int injected = 0;
  int detected = 0;  // the planted finding was reported
  int exact = 0;     // ...and nothing else by any rule detector
};

struct CorpusScore {
  std::map<std::string, ClassScore> classes;
  int clean_trees = 0;
  int clean_findings = 0;  // rule findings on the clean trees: false positives

  double recall() const;
};

CorpusScore score_corpus(const InjectionCorpus& corpus, const LintOptions& options);

nlohmann::json manifest_to_json(const std::vector<Injection>& manifest);

}  // namespace tow::lint
