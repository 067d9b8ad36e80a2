// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gradient_check.hpp"
#include "minimax_oracle.hpp"
#include "tow/lint/injection.hpp"
#include "tow/lint/scan.hpp"
#include "tow/search/build.hpp"
#include "tow/service/library.hpp"
#include "tow/service/play.hpp"
#include "tow/train/transition_data.hpp"

namespace {

using namespace tow;
using Clock = std::chrono::steady_clock;

struct Verdict {
  Verdict() = default;
  Verdict(bool pass, std::string detail, std::vector<std::string> notes = {})
      : pass(pass), detail(std::move(detail)), notes(std::move(notes)) {}

  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // printed indented under the verdict
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared by the criteria that need trained models.
struct Desk {
  game::GameConfig cfg;
  train::TournamentPool pool;
  std::shared_ptr<const models::QFunction> agent;
  std::shared_ptr<const models::TransitionModel> transition;
  std::optional<train::ReplayBuffer> buffer;
};

Verdict rules_invariants() {
  const game::GameConfig cfg;
  const auto t0 = Clock::now();
  long long violations = 0;
  long long waves_total = 0;
  int longest = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    game::SplitMix64 pick{seed * 0x9e3779b97f4a7c15ULL + 1};
    game::MicroState s = game::new_game(cfg, seed);
    int waves = 0;
    while (!game::terminal_outcome(s, cfg)) {
      const auto a1 = game::legal_actions(s, game::Player::One, cfg);
      const auto a2 = game::legal_actions(s, game::Player::Two, cfg);
      const auto& p1 = a1[pick.next() % a1.size()];
      const auto& p2 = a2[pick.next() % a2.size()];
      const game::MicroState next = game::resolve_wave(s, p1, p2, cfg).state;
      for (game::Player p : {game::Player::One, game::Player::Two}) {
        const auto& before = s.player(p);
        const auto& after = next.player(p);
        const auto& a = p == game::Player::One ? p1 : p2;
        if (after.currency != before.currency + cfg.stipend(after.pylons) - game::action_cost(a, cfg)) ++violations;
        if (after.currency < 0 || after.pylons > cfg.max_pylons || after.pylons < before.pylons) ++violations;
        for (int l = 0; l < game::kNumLanes; ++l) {
          if (after.base_health[l] > before.base_health[l] || after.base_health[l] < 0) ++violations;
          for (int t = 0; t < game::kNumUnitTypes; ++t) {
            if (after.buildings[l][t] < before.buildings[l][t]) ++violations;
          }
        }
      }
      s = next;
      ++waves;
    }
    if (s.wave > cfg.max_waves + 1) ++violations;
    waves_total += waves;
    longest = std::max(longest, waves);
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 300,
          format("10000 games, %lld waves (longest %d), %lld violations, %.1f s (target < 300 s)", waves_total,
                 longest, violations, secs)};
}

Verdict oracle_equivalence() {
  // Only marines are affordable and income is 1 per wave, so nobody ever
  // holds 150: at most null plus one or two marines in either lane.
  game::GameConfig cfg;
  cfg.start_currency = 100;
  cfg.base_stipend = 1;
  cfg.pylon_stipend_bonus = 1;
  cfg.building_costs = {50, 100000, 100000};
  cfg.pylon_cost = 100000;
  const auto q = models::QFunction::init(11, 32);
  const search::SearchParams params{2, {6, 6}, {6, 6}};
  const auto source = search::legal_action_source(cfg, 0);
  std::mt19937_64 gen(2024);
  int value_match = 0;
  int action_match = 0;
  int unique_best = 0;
  std::size_t most_actions = 0;
  long long leaves = 0;
  for (int root_i = 0; root_i < 100; ++root_i) {
    game::AbstractState root;
    root.wave = 1 + static_cast<int>(gen() % 30);
    for (auto& h : root.base_health) h = 0.2 + 0.8 * std::uniform_real_distribution<double>(0, 1)(gen);
    root.own_currency = static_cast<int>(gen() % 141);
    for (int side = 0; side < 2; ++side) {
      for (int lane = 0; lane < game::kNumLanes; ++lane) {
        root.buildings[side][lane][0] = static_cast<int>(gen() % 3);
        for (int cell = 0; cell < game::kCellsPerLane; ++cell) {
          if (root.buildings[side][lane][0] > 0) {
            root.unit_grid[side][0][game::cell_index(static_cast<game::Lane>(lane), cell)] = static_cast<int>(gen() % 3);
          }
        }
      }
    }
    const int enemy = static_cast<int>(gen() % 141);
    const search::SimulatorDynamics dynamics(cfg, gen());
    const search::SearchContext ctx{q, dynamics, source, cfg};
    const auto tree = search::build_tree(root, enemy, ctx, params);
    for (const auto& n : tree.nodes) {
      most_actions = std::max({most_actions, game::count_actions(n.state.own_currency, n.state.pylons[0], cfg),
                               game::count_actions(n.enemy_currency, n.state.pylons[1], cfg)});
    }
    leaves += tree.count_at_depth(2);
    const auto oracle = testing_support::oracle_root(root, enemy, ctx, params);
    if (tree.root().value.agent_value() == oracle.value.agent_value()) ++value_match;
    const auto chosen = search::best_action(tree).action;
    if (std::find(oracle.best.begin(), oracle.best.end(), chosen) != oracle.best.end()) ++action_match;
    if (oracle.best.size() == 1) ++unique_best;
  }
  return {value_match == 100 && action_match == 100 && most_actions <= 6,
          format("100 roots: values equal %d/100, chosen action optimal %d/100 (unique optimum in %d), "
                 "max legal actions %zu, %lld depth-2 states",
                 value_match, action_match, unique_best, most_actions, leaves)};
}

Verdict tree_shape(const Desk& desk) {
  const search::SearchParams params;  // D=2, f=(20,5), e=(10,3)
  const search::LearnedDynamics dynamics(*desk.transition, desk.cfg);
  const search::SearchContext ctx{*desk.agent, dynamics, search::legal_action_source(desk.cfg, 64), desk.cfg};
  const train::RandomPolicy random(desk.cfg);
  game::SplitMix64 rng{99};
  int trees = 0;
  int bad = 0;
  int max_root = 0;
  int max_d1 = 0;
  int max_leaves = 0;
  while (trees < 20) {
    const auto g = train::play_game(random, random, rng.next(), desk.cfg, rng);
    const auto& step = g.steps[rng.next() % g.steps.size()];
    const auto root = game::abstract(step.before, game::Player::One, desk.cfg);
    if (search::is_terminal_state(root, params.terminal_threshold, desk.cfg)) continue;
    const auto tree = search::build_tree(root, step.before.player(game::Player::Two).currency, ctx, params);
    const auto table = search::root_action_table(tree);
    bool sorted = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
      sorted = sorted && table[i - 1].value.agent_value() >= table[i].value.agent_value();
    }
    const int root_actions = static_cast<int>(table.size());
    const int d1 = tree.count_at_depth(1);
    const int leaves = tree.count_at_depth(2);
    if (root_actions > 20 || d1 > 200 || leaves > 3000 || !sorted) ++bad;
    max_root = std::max(max_root, root_actions);
    max_d1 = std::max(max_d1, d1);
    max_leaves = std::max(max_leaves, leaves);
    ++trees;
  }
  return {bad == 0, format("20 trees: max %d root actions, %d depth-1 states, %d leaves; %d violations", max_root,
                           max_d1, max_leaves, bad)};
}

Verdict gradient_check() {
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto act = i % 5 == 4 ? nn::OutputActivation::Softmax : nn::OutputActivation::Identity;
    worst = std::max(worst, testing_support::max_gradient_relative_error(1000 + i, act));
  }
  return {worst < 1e-4, format("50 nets, max relative error %.3g (bound 1e-4)", worst)};
}

Verdict dr_dqn_identity() {
  const game::GameConfig cfg;
  const train::RandomPolicy random(cfg);
  game::SplitMix64 rng{31};
  std::vector<train::TransitionRecord> pool;
  for (int g = 0; g < 60; ++g) {
    auto recs = train::game_transitions(train::play_game(random, random, rng.next(), cfg, rng), cfg);
    pool.insert(pool.end(), recs.begin(), recs.end());
  }
  const auto source = search::legal_action_source(cfg, 32);
  double worst = 0;
  long long records = 0;
  for (int b = 0; b < 1000; ++b) {
    const auto online = models::QFunction::init(5000 + b, 16);
    const auto target = models::QFunction::init(9000 + b, 16);
    std::vector<train::TransitionRecord> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(pool[rng.next() % pool.size()]);
    const double gamma = b % 2 ? 1.0 : 0.5 + 0.5 * rng.uniform();
    const auto t = train::dr_dqn_targets(batch, online, target, gamma, source, cfg);
    const auto scalar = train::scalar_dqn_targets(batch, target, gamma, t.next_best, cfg);
    for (std::size_t i = 0; i < batch.size(); ++i) worst = std::max(worst, std::abs(t.targets.col(i).sum() - scalar[i]));
    records += static_cast<long long>(batch.size());
  }
  return {worst <= 1e-12, format("1000 batches (%lld records), max |sum - scalar| = %.3g", records, worst)};
}

Verdict desk_learning(Desk& desk) {
  train::TrainConfig tc;
  tc.max_steps = 30000;
  tc.candidate_limit = 128;
  tc.target_sync = 500;
  tc.win_rate_threshold = 0.9;
  tc.seed = 1;
  const auto t0 = Clock::now();
  auto result = train::run_tournament(1, tc, desk.cfg);
  const double train_secs = seconds_since(t0);
  desk.pool = result.pool;
  desk.agent = desk.pool.latest();
  desk.buffer = std::move(result.generations.front().buffer);
  const train::QPolicy greedy(desk.agent, desk.cfg, 0.0, tc.candidate_limit, "agent");
  const train::RandomPolicy random(desk.cfg);
  const auto eval = train::evaluate(greedy, random, 100, 777, desk.cfg);
  const auto& gen = result.generations.front();
  return {eval.win_rate() >= 0.8 && train_secs <= 3600,
          format("1 generation: %d games, %lld steps, %.1f s, threshold %s; greedy agent won %d/100 vs random",
                 gen.games, gen.steps, train_secs, gen.reached_threshold ? "reached" : "not reached", eval.wins)};
}

Verdict transition_quality(Desk& desk) {
  const auto t0 = Clock::now();
  std::vector<train::TransitionRecord> data;
  int games = 3000;
  for (std::uint64_t round = 0; data.size() < 50000; ++round) {
    auto more = train::collect_transition_dataset(desk.pool, games, 500 + round, desk.cfg, 128,
                                                  round == 0 && desk.buffer ? &*desk.buffer : nullptr);
    data.insert(data.end(), more.begin(), more.end());
    games = 1000;
  }
  train::FitConfig fit;
  fit.epochs = 10;
  fit.seed = 3;
  const auto result = train::fit_transition_model(data, fit, desk.cfg);
  desk.transition = std::make_shared<models::TransitionModel>(result.model);
  const auto& h = result.holdout;
  return {data.size() >= 50000 && h.health_mae < 0.05 && h.grid_mae < 0.10,
          format("%zu records (%zu held out): health MAE %.4f (< 0.05), grid MAE %.4f (< 0.10) normalized, "
                 "%.3f units per cell; %.1f s",
                 data.size(), h.records, h.health_mae, h.grid_mae, h.grid_count_mae, seconds_since(t0))};
}

Verdict detector_recall(const Desk& desk) {
  lint::GroundTruthOptions gt;
  gt.config = desk.cfg;
  lint::LintOptions options;
  options.config = desk.cfg;
  const auto clean = lint::ground_truth_trees(200, 4242, *desk.agent, gt);
  const auto clean_score = lint::score_corpus({clean, {}, {}}, options);

  // Draw trees until 200 have a planted violation.
  std::vector<search::SearchTree> pool;
  lint::InjectionCorpus corpus;
  for (std::uint64_t seed = 1; corpus.manifest.size() < 200 && seed < 50; ++seed) {
    auto more = lint::ground_truth_trees(100, 9000 + seed, *desk.agent, gt);
    pool.insert(pool.end(), more.begin(), more.end());
    corpus = lint::build_injection_corpus(pool, 17, options);
  }
  corpus.manifest.resize(std::min<std::size_t>(corpus.manifest.size(), 200));
  corpus.injected.resize(corpus.manifest.size());
  corpus.clean.clear();
  const auto score = lint::score_corpus(corpus, options);
  std::string classes;
  bool all_classes = true;
  int exact = 0;
  for (const auto& [id, c] : score.classes) {
    classes += format(" %s %d/%d", id.c_str(), c.detected, c.injected);
    all_classes = all_classes && c.injected > 0;
    exact += c.exact;
  }
  const int injected = static_cast<int>(corpus.manifest.size());
  return {injected >= 200 && all_classes && score.recall() == 1.0 && clean_score.clean_findings == 0,
          format("recall %.3f over %d injected trees (%s), %d with no stray finding; %d rule findings on %d "
                 "ground-truth trees",
                 score.recall(), injected, classes.c_str() + 1, exact, clean_score.clean_findings,
                 clean_score.clean_trees)};
}

Verdict flaw_scan_parity(const Desk& desk, const std::filesystem::path& library_dir) {
  service::Settings settings;
  settings.game = desk.cfg;
  settings.lint.config = desk.cfg;
  service::TrainedModels models{desk.pool, desk.transition};
  std::filesystem::remove_all(library_dir);
  service::ReplayLibrary library(library_dir);
  int losses = 0;
  int played = 0;
  // Self-play guarantees a loser every game; the recorded side alternates.
  for (std::uint64_t seed = 1; losses < 6 && played < 60; ++seed) {
    for (auto& r : service::play_games(models, settings, 2, service::Opponent::Self, seed)) {
      ++played;
      if (r.agent_lost()) ++losses;
      library.add(r);
    }
  }
  std::vector<lint::Replay> losing;
  for (const auto& e : library.entries()) {
    if (e.agent_lost) losing.push_back(library.load(e.game_id, true));
  }
  const auto scan = lint::scan_library(losing, lint::select_detectors("health"), settings.lint);
  std::vector<std::string> notes;
  for (const auto& g : scan.games) {
    notes.push_back(format("%-16s decisions %2d  health rise before the loss: %-3s  max rise %.3f%s", g.game_id.c_str(),
                           g.decisions, g.final_health_rise ? "yes" : "no", g.final_health_rise_max,
                           g.final_health_rise_severe ? "  (severe)" : ""));
  }
  const bool shape = static_cast<int>(scan.games.size()) == scan.losing_games &&
                     scan.totals.count("health") == 1 && scan.histograms.count("health") == 1;
  return {scan.losing_games >= 6 && shape,
          format("%d losing games of %d played: health rise at the decision before the loss in %d/%d, severe "
                 "(>10%%) in %d; %d health findings overall; library at %s",
                 scan.losing_games, played, scan.losing_with_final_rise, scan.losing_games,
                 scan.losing_with_severe_final_rise, scan.totals.at("health"), library_dir.string().c_str()),
          notes};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path work = argc > 1 ? argv[1] : "acceptance_artifacts";
  Desk desk;
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"rules invariants", rules_invariants},
      {"search oracle equivalence", oracle_equivalence},
      {"neural gradient check", gradient_check},
      {"drDQN aggregation identity", dr_dqn_identity},
      {"desk-scale learning", [&] { return desk_learning(desk); }},
      {"transition model quality", [&] { return transition_quality(desk); }},
      {"default tree shape", [&] { return tree_shape(desk); }},
      {"detector soundness and recall", [&] { return detector_recall(desk); }},
      {"flaw-scan pipeline parity", [&] { return flaw_scan_parity(desk, work / "parity_library"); }},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s  %-30s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                seconds_since(t0));
    for (const auto& n : v.notes) std::printf("      %s\n", n.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
