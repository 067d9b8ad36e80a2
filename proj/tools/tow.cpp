// tow: train agents, play explained games, lint and serve the library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "tow/lint/interest.hpp"
#include "tow/lint/scan.hpp"
#include "tow/nn/checkpoint.hpp"
#include "tow/search/serialize.hpp"
#include "tow/service/api.hpp"
#include "tow/service/library.hpp"
#include "tow/service/play.hpp"
#include "tow/train/transition_data.hpp"

namespace {

namespace fs = std::filesystem;
using namespace tow;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> library;
  std::optional<std::string> models;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for every random choice");
    cmd->add_option("--config", config, "Config file (default: $TOW_CONFIG)");
    cmd->add_option("--library", library, "Replay library directory");
    cmd->add_option("--models", models, "Model directory");
  }

  service::Settings settings() const {
    auto s = service::load_settings(config ? std::optional<fs::path>(*config) : std::nullopt);
    if (seed) s.set_seed(*seed);
    if (library) s.library = *library;
    if (models) s.models = *models;
    return s;
  }
};

void print_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(1) << '\n';
  } else {
    service::write_atomically(path, j.dump(1) + "\n");
  }
}

int cmd_train(const service::Settings& s) {
  fs::create_directories(s.models);
  std::ofstream log(s.models / "train_log.jsonl", std::ios::trunc);
  const auto result = train::run_tournament(s.generations, s.train, s.game, [&](const train::TrainLogEntry& e) {
    train::write_log(log, {&e, 1});
    std::fprintf(stderr, "step %lld games %d win_rate %.3f epsilon %.3f loss %.5f\n", e.step, e.games, e.win_rate,
                 e.epsilon, e.loss);
  });
  train::save_pool(result.pool, s.models / "pool");
  for (std::size_t g = 0; g < result.generations.size(); ++g) {
    const auto& r = result.generations[g];
    std::fprintf(stderr, "generation %zu: %s, best trailing win rate %.3f after %d games\n", g + 1,
                 r.reached_threshold ? "reached threshold" : "budget exhausted", r.best_win_rate, r.games);
  }

  std::fprintf(stderr, "collecting transitions from %d games\n", s.fit_games);
  const auto data = train::collect_transition_dataset(result.pool, s.fit_games, s.seed, s.game, s.train.candidate_limit,
                                                      &result.generations.back().buffer);
  train::save_dataset(data, s.models / "transitions.bin");
  const auto fit = train::fit_transition_model(data, s.fit, s.game);
  service::save_transition(fit.model, s.models);
  const nlohmann::json metrics = {{"records", data.size()},
                                  {"holdout_records", fit.holdout.records},
                                  {"health_mae", fit.holdout.health_mae},
                                  {"grid_mae", fit.holdout.grid_mae},
                                  {"grid_count_mae", fit.holdout.grid_count_mae},
                                  {"building_mae", fit.holdout.building_mae},
                                  {"currency_mae", fit.holdout.currency_mae},
                                  {"reward_mae", fit.holdout.reward_mae}};
  service::write_atomically(s.models / "transition_metrics.json", metrics.dump(1) + "\n");
  std::cout << metrics.dump(1) << '\n';
  return 0;
}

int cmd_play(const service::Settings& s, int count, const std::string& vs) {
  const auto opponent = service::opponent_from_string(vs);
  const auto models = service::load_models(s.models);
  service::ReplayLibrary library(s.library);
  service::play_games(models, s, count, opponent, s.seed, [&](const lint::Replay& r) {
    library.add(r);
    std::printf("%s %s in %zu decisions (%s)\n", r.game_id.c_str(), r.agent_lost() ? "lost" : "won",
                r.decisions.size(), std::string(game::to_string(r.outcome.condition)).c_str());
  });
  return 0;
}

std::vector<lint::Replay> load_games(const service::ReplayLibrary& library, const std::string& only) {
  std::vector<lint::Replay> out;
  for (const auto& e : library.entries()) {
    if (only.empty() || e.game_id == only) out.push_back(library.load(e.game_id, true));
  }
  if (!only.empty() && out.empty()) throw std::runtime_error("unknown game '" + only + "'");
  return out;
}

int cmd_lint(const service::Settings& s, const std::string& detectors, const std::string& game_id,
             const std::string& out) {
  const service::ReplayLibrary library(s.library);
  const auto scan = lint::scan_library(load_games(library, game_id), lint::select_detectors(detectors), s.lint);
  const auto doc = lint::scan_to_json(scan);
  if (game_id.empty() && detectors.empty()) service::write_atomically(s.library / "lint.json", doc.dump(1) + "\n");
  print_json(doc, out);
  for (const auto& [id, n] : scan.totals) std::fprintf(stderr, "%-10s %d\n", id.c_str(), n);
  std::fprintf(stderr, "losing games %d, health rise before the loss in %d (severe in %d)\n", scan.losing_games,
               scan.losing_with_final_rise, scan.losing_with_severe_final_rise);
  return 0;
}

int cmd_interest(const service::Settings& s, const std::string& game_id, int top) {
  const service::ReplayLibrary library(s.library);
  const auto ranked = lint::rank_by_drop(lint::interest_scores(library.load(game_id, false)));
  std::printf("%8s %10s %11s %11s\n", "decision", "drop", "fluctuation", "criticality");
  for (std::size_t i = 0; i < ranked.size() && (top <= 0 || static_cast<int>(i) < top); ++i) {
    const auto& r = ranked[i];
    if (r.value_drop) {
      std::printf("%8d %10.4f %11.4f %11.4f\n", r.decision, *r.value_drop, r.fluctuation, r.criticality);
    } else {
      std::printf("%8d %10s %11.4f %11.4f\n", r.decision, "-", r.fluctuation, r.criticality);
    }
  }
  return 0;
}

int cmd_serve(const service::Settings& s, std::optional<std::string> host, std::optional<int> port) {
  const service::LibraryApi api(service::ReplayLibrary(s.library), s.lint);
  const std::string h = host.value_or(s.host);
  const int p = port.value_or(s.port);
  std::fprintf(stderr, "serving %s on http://%s:%d/api/games\n", s.library.string().c_str(), h.c_str(), p);
  service::serve(api, h, p);
  return 0;
}

int cmd_export(const service::Settings& s, const std::string& game_id, const std::string& out_dir) {
  const service::ReplayLibrary library(s.library);
  const fs::path out(out_dir);
  fs::create_directories(out);
  const auto settings_text = s.to_text();
  service::write_atomically(out / "config.txt", settings_text);
  for (const auto& replay : load_games(library, game_id)) {
    const fs::path dir = out / replay.game_id;
    fs::create_directories(dir);
    service::write_atomically(dir / "replay.json", lint::replay_to_json(replay, true).dump(1) + "\n");
    const auto reports = lint::lint_replay(replay, lint::all_detectors(), s.lint);
    service::write_atomically(dir / "flaws.json", lint::reports_to_json(reports).dump(1) + "\n");
    std::printf("exported %s\n", replay.game_id.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tug of War agents with explanation trees"};
  app.require_subcommand(1);

  Common common;
  auto* train_cmd = app.add_subcommand("train", "Run the tournament and fit the transition model");
  common.attach(train_cmd);

  auto* play_cmd = app.add_subcommand("play", "Play explained games into the library");
  int count = 1;
  std::string vs = "random";
  play_cmd->add_option("n", count, "Number of games")->check(CLI::PositiveNumber);
  play_cmd->add_option("--vs", vs, "Opponent: random, pool or self");
  common.attach(play_cmd);

  auto* lint_cmd = app.add_subcommand("lint", "Scan the library's trees for flaws");
  std::string detectors;
  std::string game_id;
  std::string out;
  lint_cmd->add_option("--detectors", detectors, "Comma separated detector ids (default: all)");
  lint_cmd->add_option("--game", game_id, "Only this game");
  lint_cmd->add_option("--output", out, "Write the report here instead of stdout");
  common.attach(lint_cmd);

  auto* interest_cmd = app.add_subcommand("interest", "Rank a game's decisions by value drop");
  int top = 0;
  interest_cmd->add_option("game", game_id, "Game id")->required();
  interest_cmd->add_option("--top", top, "Only the first N rows");
  common.attach(interest_cmd);

  auto* serve_cmd = app.add_subcommand("serve", "Serve the library over HTTP");
  std::optional<std::string> host;
  std::optional<int> port;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");
  common.attach(serve_cmd);

  auto* export_cmd = app.add_subcommand("export", "Write self-contained replay, tree and flaw files");
  std::string export_dir = "export";
  export_cmd->add_option("--game", game_id, "Only this game");
  export_cmd->add_option("--out", export_dir, "Output directory");
  common.attach(export_cmd);

  CLI11_PARSE(app, argc, argv);
  try {
    const auto settings = common.settings();
    if (*train_cmd) return cmd_train(settings);
    if (*play_cmd) return cmd_play(settings, count, vs);
    if (*lint_cmd) return cmd_lint(settings, detectors, game_id, out);
    if (*interest_cmd) return cmd_interest(settings, game_id, top);
    if (*serve_cmd) return cmd_serve(settings, host, port);
    if (*export_cmd) return cmd_export(settings, game_id, export_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tow: %s\n", e.what());
    return 1;
  }
  return 0;
}
