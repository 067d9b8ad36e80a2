#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tow/models/q_function.hpp"
#include "tow/nn/mlp.hpp"
#include "tow/search/dynamics.hpp"
#include "tow/train/replay_buffer.hpp"

namespace tow::train {

struct TrainConfig {
  double gamma = 1.0;
  double learning_rate = 1e-3;
  int batch_size = 64;
  std::size_t buffer_capacity = 100000;
  int target_sync = 1000;  // updates between target-network copies
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  long long max_steps = 200000;  // learner decisions; epsilon anneals over the first half
  int max_games = 0;             // 0 = no game budget
  double win_rate_threshold = 0.75;
  int win_rate_window = 200;
  int update_every = 1;  // learner decisions per gradient update
  std::size_t candidate_limit = 256;
  int hidden = models::kDefaultHidden;
  std::uint64_t seed = 1;
  int log_every = 50;  // games between log records

  void validate() const;  // throws std::invalid_argument
  double epsilon_at(long long step) const;
};

struct DqnTargets {
  Eigen::MatrixXd targets;                  // 6 x batch
  std::vector<game::PlayerAction> next_best;  // a* per record (null action for terminal records)
};

// Decomposed Reward DQN: a* = argmax over next-state actions of the summed
// online components; target_c = r_c + gamma * q_target_c(s', a*), or r for
// terminal records.
DqnTargets dr_dqn_targets(std::span<const TransitionRecord> batch, const models::QFunction& online,
                          const models::QFunction& target, double gamma, const search::ActionSource& next_actions,
                          const game::GameConfig& config);

// Scalar DQN target with a given a*: sum(r) + gamma * sum(q_target(s', a*)).
std::vector<double> scalar_dqn_targets(std::span<const TransitionRecord> batch, const models::QFunction& target,
                                       double gamma, std::span<const game::PlayerAction> next_best,
                                       const game::GameConfig& config);

// One Adam step of Q(s, a_friendly) toward `targets`; returns the loss.
double q_update(models::QFunction& online, nn::Adam& optimizer, std::span<const TransitionRecord> batch,
                const Eigen::MatrixXd& targets, const game::GameConfig& config);

struct TrainLogEntry {
  long long step = 0;
  int games = 0;
  long long updates = 0;
  double loss = 0;      // mean loss since the previous record
  double win_rate = 0;  // trailing window
  double epsilon = 0;

  friend bool operator==(const TrainLogEntry&, const TrainLogEntry&) = default;
};

void write_log(std::ostream& out, std::span<const TrainLogEntry> log);  // one JSON object per line

}  // namespace tow::train
