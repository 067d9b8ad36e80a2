#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tow/train/agents.hpp"
#include "tow/train/dqn.hpp"

namespace tow::train {

// A frozen agent; no Q-function means the uniform-random agent.
struct PoolMember {
  std::string name;
  std::shared_ptr<const models::QFunction> q;
  int games = 0;  // games played against learners
  int wins = 0;

  friend bool operator==(const PoolMember& a, const PoolMember& b) {
    return a.name == b.name && a.games == b.games && a.wins == b.wins && (a.q == nullptr) == (b.q == nullptr) &&
           (!a.q || *a.q == *b.q);
  }
};

struct TournamentPool {
  std::vector<PoolMember> members;

  static TournamentPool seeded();  // just the random agent
  std::unique_ptr<Policy> policy(std::size_t i, const game::GameConfig& config, std::size_t candidate_limit) const;
  // The designated search agent: the last trained member.
  std::shared_ptr<const models::QFunction> latest() const;

  friend bool operator==(const TournamentPool&, const TournamentPool&) = default;
};

// Directory with pool.json plus one checkpoint per trained member.
void save_pool(const TournamentPool& pool, const std::filesystem::path& dir);
TournamentPool load_pool(const std::filesystem::path& dir);

struct TrainResult {
  models::QFunction agent;
  std::vector<TrainLogEntry> log;
  bool reached_threshold = false;  // false: budget ran out and `agent` is the best checkpoint seen
  double best_win_rate = 0;
  long long steps = 0;
  int games = 0;
  ReplayBuffer buffer{1};
};

using ProgressFn = std::function<void(const TrainLogEntry&)>;

// Epsilon-greedy self-play against members sampled uniformly per game,
// learner seat drawn per game, drDQN updates from the replay buffer.
TrainResult train_agent(TournamentPool& pool, const TrainConfig& config, const game::GameConfig& game_config,
                        const ProgressFn& progress = {});

struct TournamentResult {
  TournamentPool pool;
  std::vector<TrainResult> generations;
};

// Trains `generations` agents in turn, each against the pool so far, and
// appends each to the pool. Generation g uses seed config.seed + g.
TournamentResult run_tournament(int generations, const TrainConfig& config, const game::GameConfig& game_config,
                                const ProgressFn& progress = {});

}  // namespace tow::train
