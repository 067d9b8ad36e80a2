#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tow/game/config.hpp"
#include "tow/lint/detectors.hpp"
#include "tow/search/tree.hpp"
#include "tow/train/dqn.hpp"
#include "tow/train/transition_data.hpp"

namespace tow::service {

// Everything the command line and the server can be configured with. Read
// from a "key = value" file (see docs/config.md); unknown keys are errors.
struct Settings {
  std::uint64_t seed = 1;
  game::GameConfig game;
  search::SearchParams search;
  std::size_t candidate_limit = 64;  // actions scored per ranking or leaf evaluation
  train::TrainConfig train;
  int generations = 1;
  train::FitConfig fit;
  int fit_games = 3000;
  lint::LintOptions lint;
  std::filesystem::path library = "library";
  std::filesystem::path models = "models";
  std::string host = "127.0.0.1";
  int port = 8080;

  // Throws std::invalid_argument on the first inconsistent value.
  void validate() const;
  // Canonical text; parse_settings(to_text()) gives back an equal object.
  std::string to_text() const;
  // Hash of everything that shapes a played game: rules, search and seed-free knobs.
  std::string play_hash() const;
  // Spreads `seed` into the training and fitting seeds.
  void set_seed(std::uint64_t s);
};

// Throws std::invalid_argument naming the line of an unknown key or bad value.
Settings parse_settings(const std::string& text);
Settings load_settings_file(const std::filesystem::path& path);

// `flag` if given, else $TOW_CONFIG if set, else nothing.
std::optional<std::filesystem::path> settings_path(const std::optional<std::filesystem::path>& flag);
Settings load_settings(const std::optional<std::filesystem::path>& flag);

}  // namespace tow::service
