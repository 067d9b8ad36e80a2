#include "tow/service/play.hpp"

#include <cstdio>
#include <stdexcept>

#include "tow/game/economy.hpp"
#include "tow/nn/checkpoint.hpp"
#include "tow/search/build.hpp"

namespace tow::service {

SearchAgent::SearchAgent(std::shared_ptr<const models::QFunction> q,
                         std::shared_ptr<const models::TransitionModel> transition, game::GameConfig config,
                         search::SearchParams params, std::size_t candidate_limit)
    : q_(std::move(q)),
      transition_(std::move(transition)),
      config_(std::move(config)),
      params_(std::move(params)),
      candidate_limit_(candidate_limit) {
  if (!q_ || !transition_) throw std::invalid_argument("SearchAgent: missing model");
  params_.validate();
}

SearchAgent::Choice SearchAgent::decide(const game::AbstractState& s, int enemy_currency) const {
  const search::LearnedDynamics dynamics(*transition_, config_);
  const search::SearchContext ctx{*q_, dynamics, search::legal_action_source(config_, candidate_limit_), config_};
  Choice c;
  if (!search::is_terminal_state(s, params_.terminal_threshold, config_)) {
    c.tree = search::build_tree(s, enemy_currency, ctx, params_);
    c.root_table = search::root_action_table(c.tree);
    c.action = search::best_action(c.tree).action;
    return c;
  }
  const auto candidates = ctx.actions(s.own_currency, s.pylons[game::kSelf]);
  const auto ranked = models::rank_actions(*q_, s, candidates, static_cast<std::size_t>(params_.friendly[0]), config_);
  c.tree.params = params_;
  search::TreeNode root;
  root.state = s;
  root.enemy_currency = enemy_currency;
  root.value = ranked.front().value;
  root.valued = true;
  root.terminal = true;
  root.pv = true;
  c.tree.nodes.push_back(root);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    c.root_table.push_back({ranked[i].action, static_cast<int>(i), ranked[i].value});
  }
  c.action = ranked.front().action;
  return c;
}

game::PlayerAction SearchPolicy::act(const game::MicroState& state, game::Player seat, game::SplitMix64&) const {
  const auto s = game::abstract(state, seat, config_);
  return agent_->decide(s, state.player(game::opponent(seat)).currency).action;
}

lint::Replay play_recorded(const SearchAgent& agent, const train::Policy& opponent, std::uint64_t seed,
                           game::Player seat, const std::string& game_id, const Settings& settings) {
  const auto& cfg = settings.game;
  lint::Replay r;
  r.game_id = game_id;
  r.config_hash = settings.play_hash();
  r.seed = seed;
  r.agent = "search";
  r.opponent = opponent.name();
  r.agent_seat = seat;
  game::MicroState state = game::new_game(cfg, seed);
  game::SplitMix64 rng{seed ^ 0x6a09e667f3bcc909ULL};
  std::vector<game::ObservedWave> history;
  while (true) {
    const auto s = game::abstract(state, seat, cfg);
    lint::Decision d;
    d.index = static_cast<int>(r.decisions.size());
    d.state = s;
    d.enemy_currency_estimate = game::estimate_enemy_currency(history, cfg).currency;
    auto choice = agent.decide(s, d.enemy_currency_estimate);
    d.agent_action = choice.action;
    d.opponent_action = opponent.act(state, game::opponent(seat), rng);
    d.tree = std::move(choice.tree);
    d.root_table = std::move(choice.root_table);
    const bool first = seat == game::Player::One;
    auto result = game::resolve_wave(state, first ? d.agent_action : d.opponent_action,
                                     first ? d.opponent_action : d.agent_action, cfg);
    state = std::move(result.state);
    history.push_back({s, game::infer_purchase(s, game::abstract(state, seat, cfg), game::kEnemy)});
    r.decisions.push_back(std::move(d));
    if (result.outcome) {
      r.outcome = *result.outcome;
      break;
    }
  }
  r.final_wave = state.wave;
  return r;
}

Opponent opponent_from_string(const std::string& s) {
  if (s == "random") return Opponent::Random;
  if (s == "pool") return Opponent::Pool;
  if (s == "self") return Opponent::Self;
  throw std::invalid_argument("unknown opponent '" + s + "' (expected random, pool or self)");
}

std::string to_string(Opponent o) {
  switch (o) {
    case Opponent::Random: return "random";
    case Opponent::Pool: return "pool";
    case Opponent::Self: return "self";
  }
  return "";
}

TrainedModels load_models(const std::filesystem::path& dir) {
  TrainedModels m;
  m.pool = train::load_pool(dir / "pool");
  if (!m.pool.latest()) throw std::runtime_error("model pool in " + dir.string() + " has no trained agent");
  m.transition = std::make_shared<models::TransitionModel>(nn::load_params_file(dir / "transition.bin"));
  return m;
}

void save_transition(const models::TransitionModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto tmp = dir / "transition.bin.tmp";
  nn::save_params_file(model.net(), tmp);
  std::filesystem::rename(tmp, dir / "transition.bin");
}

std::vector<lint::Replay> play_games(const TrainedModels& models, const Settings& settings, int count,
                                     Opponent opponent, std::uint64_t seed, const PlayProgress& progress) {
  const auto agent = std::make_shared<SearchAgent>(models.pool.latest(), models.transition, settings.game,
                                                   settings.search, settings.candidate_limit);
  game::SplitMix64 seeds{seed};
  std::vector<lint::Replay> out;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t game_seed = seeds.next();
    const std::uint64_t pick = seeds.next();
    std::unique_ptr<train::Policy> opp;
    switch (opponent) {
      case Opponent::Random: opp = std::make_unique<train::RandomPolicy>(settings.game); break;
      case Opponent::Pool:
        opp = models.pool.policy(pick % models.pool.members.size(), settings.game, settings.candidate_limit);
        break;
      case Opponent::Self: opp = std::make_unique<SearchPolicy>(agent, settings.game); break;
    }
    char id[96];
    std::snprintf(id, sizeof id, "%s-s%llu-%03d", to_string(opponent).c_str(), static_cast<unsigned long long>(seed), k);
    const auto seat = k % 2 == 0 ? game::Player::One : game::Player::Two;
    out.push_back(play_recorded(*agent, *opp, game_seed, seat, id, settings));
    if (progress) progress(out.back());
  }
  return out;
}

}  // namespace tow::service
