#include "tow/train/tournament.hpp"

#include <deque>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tow/nn/checkpoint.hpp"

namespace tow::train {

TournamentPool TournamentPool::seeded() { return TournamentPool{{PoolMember{"random", nullptr}}}; }

std::unique_ptr<Policy> TournamentPool::policy(std::size_t i, const game::GameConfig& config,
                                               std::size_t candidate_limit) const {
  const PoolMember& m = members.at(i);
  if (!m.q) return std::make_unique<RandomPolicy>(config);
  return std::make_unique<QPolicy>(m.q, config, 0.0, candidate_limit, m.name);
}

std::shared_ptr<const models::QFunction> TournamentPool::latest() const {
  for (auto it = members.rbegin(); it != members.rend(); ++it) {
    if (it->q) return it->q;
  }
  return nullptr;
}

void save_pool(const TournamentPool& pool, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json index = {{"schema", "tow.pool"}, {"version", 1}, {"members", nlohmann::json::array()}};
  for (std::size_t i = 0; i < pool.members.size(); ++i) {
    const auto& m = pool.members[i];
    nlohmann::json entry = {{"name", m.name}, {"games", m.games}, {"wins", m.wins}, {"checkpoint", nullptr}};
    if (m.q) {
      const std::string file = "member_" + std::to_string(i) + ".bin";
      nn::save_params_file(m.q->net(), dir / file);
      entry["checkpoint"] = file;
    }
    index["members"].push_back(entry);
  }
  const auto tmp = dir / "pool.json.tmp";
  {
    std::ofstream out(tmp);
    out << index.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_pool: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / "pool.json");
}

TournamentPool load_pool(const std::filesystem::path& dir) {
  std::ifstream in(dir / "pool.json");
  if (!in) throw std::runtime_error("load_pool: no pool.json in " + dir.string());
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("load_pool: ") + e.what());
  }
  if (index.value("schema", "") != "tow.pool" || index.value("version", 0) != 1) {
    throw std::runtime_error("load_pool: unsupported pool format");
  }
  TournamentPool pool;
  for (const auto& entry : index.at("members")) {
    PoolMember m{entry.at("name").get<std::string>(), nullptr, entry.at("games").get<int>(),
                 entry.at("wins").get<int>()};
    if (!entry.at("checkpoint").is_null()) {
      m.q = std::make_shared<const models::QFunction>(
          nn::load_params_file(dir / entry.at("checkpoint").get<std::string>()));
    }
    pool.members.push_back(std::move(m));
  }
  if (pool.members.empty()) throw std::runtime_error("load_pool: empty pool");
  return pool;
}

TrainResult train_agent(TournamentPool& pool, const TrainConfig& config, const game::GameConfig& game_config,
                        const ProgressFn& progress) {
  config.validate();
  if (pool.members.empty()) throw std::invalid_argument("train_agent: pool is empty");
  game::SplitMix64 rng{config.seed};
  auto online = std::make_shared<models::QFunction>(models::QFunction::init(rng.next(), config.hidden));
  models::QFunction target = *online;
  nn::Adam optimizer(online->net(), nn::AdamOptions{config.learning_rate});
  QPolicy learner(online, game_config, config.epsilon_start, config.candidate_limit, "learner");
  const auto next_actions = search::legal_action_source(game_config, config.candidate_limit);

  TrainResult result;
  result.buffer = ReplayBuffer(config.buffer_capacity);
  result.agent = *online;
  std::deque<bool> window;
  int window_wins = 0;
  double loss_sum = 0;
  long long loss_count = 0;
  long long updates = 0;

  while (result.steps < config.max_steps && (config.max_games == 0 || result.games < config.max_games)) {
    const std::size_t opponent_index = rng.next() % pool.members.size();
    const auto opponent = pool.policy(opponent_index, game_config, config.candidate_limit);
    const game::Player seat = rng.next() % 2 == 0 ? game::Player::One : game::Player::Two;
    game::MicroState s = game::new_game(game_config, rng.next());

    std::optional<game::GameOutcome> outcome;
    while (!outcome) {
      learner.set_epsilon(config.epsilon_at(result.steps));
      const auto mine = learner.act(s, seat, rng);
      const auto theirs = opponent->act(s, game::opponent(seat), rng);
      const auto wave = seat == game::Player::One ? game::resolve_wave(s, mine, theirs, game_config)
                                                  : game::resolve_wave(s, theirs, mine, game_config);
      TransitionRecord record{game::abstract(s, seat, game_config), mine, theirs,
                              game::abstract(wave.state, seat, game_config), {}, wave.outcome.has_value()};
      if (wave.outcome) record.reward = models::OutcomeVector::from_condition(wave.outcome->condition, seat);
      result.buffer.push(std::move(record));
      outcome = wave.outcome;
      s = wave.state;
      ++result.steps;

      if (result.buffer.size() >= static_cast<std::size_t>(config.batch_size) &&
          result.steps % config.update_every == 0) {
        const auto batch = result.buffer.sample(static_cast<std::size_t>(config.batch_size), rng);
        const auto targets = dr_dqn_targets(batch, *online, target, config.gamma, next_actions, game_config);
        loss_sum += q_update(*online, optimizer, batch, targets.targets, game_config);
        ++loss_count;
        if (++updates % config.target_sync == 0) target = *online;
      }
    }

    const bool won = outcome->winner == seat;
    ++result.games;
    PoolMember& member = pool.members[opponent_index];
    ++member.games;
    member.wins += !won;
    window.push_back(won);
    window_wins += won;
    if (static_cast<int>(window.size()) > config.win_rate_window) {
      window_wins -= window.front();
      window.pop_front();
    }
    const double rate = static_cast<double>(window_wins) / static_cast<double>(window.size());
    const bool full = static_cast<int>(window.size()) == config.win_rate_window;
    if (full && rate > result.best_win_rate) {
      result.best_win_rate = rate;
      result.agent = *online;
    }
    const bool done = full && rate >= config.win_rate_threshold;
    if (result.games % config.log_every == 0 || done) {
      TrainLogEntry entry{result.steps, result.games, updates, loss_count ? loss_sum / loss_count : 0.0, rate,
                          config.epsilon_at(result.steps)};
      result.log.push_back(entry);
      if (progress) progress(entry);
      loss_sum = 0;
      loss_count = 0;
    }
    if (done) {
      result.reached_threshold = true;
      result.agent = *online;
      return result;
    }
  }
  // Budget spent: keep the best checkpoint, or the final one if the window
  // never filled.
  if (result.best_win_rate == 0) result.agent = *online;
  return result;
}

TournamentResult run_tournament(int generations, const TrainConfig& config, const game::GameConfig& game_config,
                                const ProgressFn& progress) {
  if (generations < 1) throw std::invalid_argument("run_tournament: need at least one generation");
  TournamentResult out;
  out.pool = TournamentPool::seeded();
  for (int g = 0; g < generations; ++g) {
    TrainConfig gen = config;
    gen.seed = config.seed + static_cast<std::uint64_t>(g);
    TrainResult r = train_agent(out.pool, gen, game_config, progress);
    out.pool.members.push_back(
        PoolMember{"gen" + std::to_string(g + 1), std::make_shared<const models::QFunction>(r.agent)});
    out.generations.push_back(std::move(r));
  }
  return out;
}

}  // namespace tow::train
