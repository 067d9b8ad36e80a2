#include "tow/train/agents.hpp"

#include <stdexcept>

#include "tow/game/abstraction.hpp"
#include "tow/search/dynamics.hpp"

namespace tow::train {

game::PlayerAction RandomPolicy::act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const {
  const auto options = game::legal_actions(state, seat, config_);
  return options[rng.next() % options.size()];
}

QPolicy::QPolicy(std::shared_ptr<const models::QFunction> q, game::GameConfig config, double epsilon,
                 std::size_t candidate_limit, std::string name)
    : q_(std::move(q)), config_(std::move(config)), epsilon_(epsilon), candidate_limit_(candidate_limit),
      name_(std::move(name)) {
  if (!q_) throw std::invalid_argument("QPolicy: no Q-function");
}

game::PlayerAction QPolicy::act(const game::MicroState& state, game::Player seat, game::SplitMix64& rng) const {
  if (epsilon_ >= 1.0 || (epsilon_ > 0.0 && rng.uniform() < epsilon_)) {
    return RandomPolicy(config_).act(state, seat, rng);
  }
  return greedy(game::abstract(state, seat, config_));
}

game::PlayerAction QPolicy::greedy(const game::AbstractState& s) const {
  const auto options =
      search::thin_actions(game::enumerate_actions(s.own_currency, s.pylons[game::kSelf], config_), candidate_limit_);
  return options[models::rank_order(q_->q_values(s, options, config_), options, 1).front()];
}

PlayedGame play_game(const Policy& p1, const Policy& p2, std::uint64_t seed, const game::GameConfig& config,
                     game::SplitMix64& rng) {
  PlayedGame g;
  game::MicroState s = game::new_game(config, seed);
  while (true) {
    PlayedStep step{s, p1.act(s, game::Player::One, rng), p2.act(s, game::Player::Two, rng)};
    auto result = game::resolve_wave(s, step.p1, step.p2, config);
    g.steps.push_back(std::move(step));
    s = std::move(result.state);
    if (result.outcome) {
      g.outcome = *result.outcome;
      g.final_state = s;
      return g;
    }
  }
}

std::vector<TransitionRecord> game_transitions(const PlayedGame& g, game::Player seat, const game::GameConfig& config) {
  std::vector<TransitionRecord> out;
  for (std::size_t i = 0; i < g.steps.size(); ++i) {
    const auto& step = g.steps[i];
    const bool last = i + 1 == g.steps.size();
    const game::MicroState& after = last ? g.final_state : g.steps[i + 1].before;
    TransitionRecord r;
    r.s = game::abstract(step.before, seat, config);
    r.friendly = seat == game::Player::One ? step.p1 : step.p2;
    r.enemy = seat == game::Player::One ? step.p2 : step.p1;
    r.next = game::abstract(after, seat, config);
    r.terminal = last;
    if (last) r.reward = models::OutcomeVector::from_condition(g.outcome.condition, seat);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TransitionRecord> game_transitions(const PlayedGame& g, const game::GameConfig& config) {
  auto out = game_transitions(g, game::Player::One, config);
  auto other = game_transitions(g, game::Player::Two, config);
  out.insert(out.end(), other.begin(), other.end());
  return out;
}

Evaluation evaluate(const Policy& agent, const Policy& opponent, int games, std::uint64_t seed,
                    const game::GameConfig& config) {
  game::SplitMix64 rng{seed};
  Evaluation e;
  for (int i = 0; i < games; ++i) {
    const bool first = i % 2 == 0;
    const std::uint64_t game_seed = rng.next();
    const PlayedGame g =
        first ? play_game(agent, opponent, game_seed, config, rng) : play_game(opponent, agent, game_seed, config, rng);
    ++e.games;
    e.wins += g.outcome.winner == (first ? game::Player::One : game::Player::Two);
  }
  return e;
}

}  // namespace tow::train
