#include "tow/lint/replay.hpp"

#include <stdexcept>

#include "tow/search/serialize.hpp"

namespace tow::lint {

nlohmann::json replay_to_json(const Replay& replay, bool with_trees) {
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : replay.decisions) {
    nlohmann::json jd = {{"index", d.index},
                         {"wave", d.state.wave},
                         {"state", search::state_to_json(d.state)},
                         {"enemy_currency_estimate", d.enemy_currency_estimate},
                         {"agent_action", search::action_to_json(d.agent_action)},
                         {"opponent_action", search::action_to_json(d.opponent_action)},
                         {"root_table", search::root_table_to_json(d.root_table)}};
    if (with_trees) jd["tree"] = search::tree_to_json(d.tree);
    decisions.push_back(std::move(jd));
  }
  return {{"schema", kReplaySchema},
          {"version", kReplaySchemaVersion},
          {"game_id", replay.game_id},
          {"config_hash", replay.config_hash},
          {"seed", replay.seed},
          {"agent", replay.agent},
          {"opponent", replay.opponent},
          {"agent_seat", game::to_string(replay.agent_seat)},
          {"outcome",
           {{"winner", game::to_string(replay.outcome.winner)},
            {"condition", game::to_string(replay.outcome.condition)},
            {"agent_won", !replay.agent_lost()}}},
          {"final_wave", replay.final_wave},
          {"decisions", std::move(decisions)}};
}

namespace {

game::Player player_from(const std::string& s) {
  if (s == game::to_string(game::Player::One)) return game::Player::One;
  if (s == game::to_string(game::Player::Two)) return game::Player::Two;
  throw std::runtime_error("replay document: unknown player '" + s + "'");
}

}  // namespace

Replay replay_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != kReplaySchema) throw std::runtime_error("replay document: wrong schema");
  if (j.value("version", -1) != kReplaySchemaVersion) throw std::runtime_error("replay document: unsupported version");
  try {
    Replay r;
    r.game_id = j.at("game_id").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.agent = j.at("agent").get<std::string>();
    r.opponent = j.at("opponent").get<std::string>();
    r.agent_seat = player_from(j.at("agent_seat").get<std::string>());
    r.outcome.winner = player_from(j.at("outcome").at("winner").get<std::string>());
    const auto cond = game::win_condition_from_string(j.at("outcome").at("condition").get<std::string>());
    if (!cond) throw std::runtime_error("replay document: unknown win condition");
    r.outcome.condition = *cond;
    r.final_wave = j.at("final_wave").get<int>();
    for (const auto& jd : j.at("decisions")) {
      Decision d;
      d.index = jd.at("index").get<int>();
      d.state = search::state_from_json(jd.at("state"));
      d.enemy_currency_estimate = jd.at("enemy_currency_estimate").get<int>();
      d.agent_action = search::action_from_json(jd.at("agent_action"));
      d.opponent_action = search::action_from_json(jd.at("opponent_action"));
      for (const auto& e : jd.at("root_table")) {
        d.root_table.push_back({search::action_from_json(e.at("action")), e.at("rank").get<int>(),
                                search::outcome_from_json(e.at("value"))});
      }
      if (jd.contains("tree")) d.tree = search::tree_from_json(jd.at("tree"));
      r.decisions.push_back(std::move(d));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("replay document: ") + e.what());
  }
}

}  // namespace tow::lint
