#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tow/game/rng.hpp"
#include "tow/game/simulator.hpp"
#include "tow/models/q_function.hpp"
#include "tow/train/replay_buffer.hpp"

namespace tow::train {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual game::PlayerAction act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const = 0;
  virtual std::string name() const = 0;
};

// Uniform over every legal action.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(game::GameConfig config) : config_(std::move(config)) {}
  game::PlayerAction act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const override;
  std::string name() const override { return "random"; }

 private:
  game::GameConfig config_;
};

// Epsilon-greedy over Q. The greedy step scores the legal actions thinned to
// `candidate_limit`; the exploratory step is exactly RandomPolicy, and at
// epsilon >= 1 no coin is drawn so the two consume the same random stream.
class QPolicy final : public Policy {
 public:
  QPolicy(std::shared_ptr<const models::QFunction> q, game::GameConfig config, double epsilon,
          std::size_t candidate_limit, std::string name = "q");
  game::PlayerAction act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const override;
  game::PlayerAction greedy(const game::AbstractState& s) const;
  std::string name() const override { return name_; }
  void set_epsilon(double epsilon) { epsilon_ = epsilon; }

 private:
  std::shared_ptr<const models::QFunction> q_;
  game::GameConfig config_;
  double epsilon_;
  std::size_t candidate_limit_;
  std::string name_;
};

struct PlayedStep {
  game::MicroState before;
  game::PlayerAction p1;
  game::PlayerAction p2;
};

struct PlayedGame {
  std::vector<PlayedStep> steps;
  game::MicroState final_state;
  game::GameOutcome outcome;
};

PlayedGame play_game(const Policy& p1, const Policy& p2, std::uint64_t seed, const game::GameConfig& config,
                     game::SplitMix64& rng);

// Both perspectives of every wave of a game.
std::vector<TransitionRecord> game_transitions(const PlayedGame& g, const game::GameConfig& config);
// One perspective only.
std::vector<TransitionRecord> game_transitions(const PlayedGame& g, game::Player seat, const game::GameConfig& config);

struct Evaluation {
  int games = 0;
  int wins = 0;
  double win_rate() const { return games == 0 ? 0.0 : static_cast<double>(wins) / games; }
};

// `games` games, alternating seats, seeds drawn from `seed`.
Evaluation evaluate(const Policy& agent, const Policy& opponent, int games, std::uint64_t seed,
                    const game::GameConfig& config);

}  // namespace tow::train
