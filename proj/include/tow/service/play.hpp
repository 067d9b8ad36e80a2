#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tow/lint/replay.hpp"
#include "tow/models/transition_model.hpp"
#include "tow/service/settings.hpp"
#include "tow/train/tournament.hpp"

namespace tow::service {

// The explained agent: builds a search tree over the learned models at
// every decision and plays the root's minimax choice.
class SearchAgent {
 public:
  SearchAgent(std::shared_ptr<const models::QFunction> q, std::shared_ptr<const models::TransitionModel> transition,
              game::GameConfig config, search::SearchParams params, std::size_t candidate_limit);

  struct Choice {
    search::SearchTree tree;
    std::vector<search::RootEntry> root_table;
    game::PlayerAction action;
  };

  // A root the search refuses (a base already at the terminal threshold)
  // gets a one-node tree valued by evaluate_state and the best Q action.
  Choice decide(const game::AbstractState& s, int enemy_currency) const;

 private:
  std::shared_ptr<const models::QFunction> q_;
  std::shared_ptr<const models::TransitionModel> transition_;
  game::GameConfig config_;
  search::SearchParams params_;
  std::size_t candidate_limit_;
};

// The search agent used as an opponent. It cannot keep an observation
// history through the Policy interface, so it reads the other side's true
// currency; only the recorded agent runs on an estimate.
class SearchPolicy final : public train::Policy {
 public:
  explicit SearchPolicy(std::shared_ptr<const SearchAgent> agent, game::GameConfig config)
      : agent_(std::move(agent)), config_(std::move(config)) {}
  game::PlayerAction act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const override;
  std::string name() const override { return "self"; }

 private:
  std::shared_ptr<const SearchAgent> agent_;
  game::GameConfig config_;
};

// Plays one game, recording every decision of the agent at `seat`.
lint::Replay play_recorded(const SearchAgent& agent, const train::Policy& opponent, std::uint64_t seed,
                           game::Player seat, const std::string& game_id, const Settings& settings);

enum class Opponent { Random, Pool, Self };
Opponent opponent_from_string(const std::string& s);  // throws std::invalid_argument
std::string to_string(Opponent o);

struct TrainedModels {
  train::TournamentPool pool;
  std::shared_ptr<const models::TransitionModel> transition;
};

// <models>/pool and <models>/transition.bin.
TrainedModels load_models(const std::filesystem::path& dir);
void save_transition(const models::TransitionModel& model, const std::filesystem::path& dir);

using PlayProgress = std::function<void(const lint::Replay&)>;

// `count` games against `opponent`, seats alternating and starting with
// Player One. Game k is named "<opponent>-s<seed>-<k>" and seeded from
// (seed, k); the pool opponent is drawn uniformly per game.
std::vector<lint::Replay> play_games(const TrainedModels& models, const Settings& settings, int count,
                                     Opponent opponent, std::uint64_t seed, const PlayProgress& progress = {});

}  // namespace tow::service
