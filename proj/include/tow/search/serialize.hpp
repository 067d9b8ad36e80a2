#pragma once

#include <json.hpp>
#include <string>

#include "tow/search/tree.hpp"

namespace tow::search {

inline constexpr const char* kTreeSchema = "tow.tree";
inline constexpr int kTreeSchemaVersion = 1;

// Documents for the pieces of an explanation tree (see docs/schemas.md).
// The *_from_json readers throw std::runtime_error on malformed input.
nlohmann::json action_to_json(const game::PlayerAction& a);
game::PlayerAction action_from_json(const nlohmann::json& j);
nlohmann::json state_to_json(const game::AbstractState& s);
game::AbstractState state_from_json(const nlohmann::json& j);
nlohmann::json outcome_to_json(const models::OutcomeVector& v);
models::OutcomeVector outcome_from_json(const nlohmann::json& j);
nlohmann::json root_table_to_json(const std::vector<RootEntry>& table);

nlohmann::json tree_to_json(const SearchTree& tree);
SearchTree tree_from_json(const nlohmann::json& j);  // rejects other schemas and versions

std::string serialize_tree(const SearchTree& tree);
SearchTree deserialize_tree(const std::string& text);

}  // namespace tow::search
