#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tow/models/transition_model.hpp"
#include "tow/train/tournament.hpp"

namespace tow::train {

// Games alternate between two random pool members and a pool member against
// the random agent; both perspectives of every wave are kept, then the
// contents of `final_buffer` (if any) are appended.
std::vector<TransitionRecord> collect_transition_dataset(const TournamentPool& pool, int games, std::uint64_t seed,
                                                         const game::GameConfig& config, std::size_t candidate_limit,
                                                         const ReplayBuffer* final_buffer = nullptr);

// Versioned binary dataset file (see docs/formats.md).
void save_dataset(std::span<const TransitionRecord> records, const std::filesystem::path& path);
std::vector<TransitionRecord> load_dataset(const std::filesystem::path& path);

struct FitConfig {
  int epochs = 30;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double holdout_fraction = 0.1;
  int hidden = models::kDefaultHidden;
  std::uint64_t seed = 1;
};

// Mean absolute error of decoded predictions in normalized feature units,
// plus the unit-grid error in raw unit counts.
struct TransitionMetrics {
  std::size_t records = 0;
  double health_mae = 0;
  double grid_mae = 0;
  double grid_count_mae = 0;
  double building_mae = 0;
  double currency_mae = 0;
  double reward_mae = 0;
};

TransitionMetrics evaluate_transition_model(const models::TransitionModel& model,
                                            std::span<const TransitionRecord> records, const game::GameConfig& config);

struct FitResult {
  models::TransitionModel model;
  TransitionMetrics train;
  TransitionMetrics holdout;
  std::vector<double> epoch_loss;
};

// Squared-error regression on shuffled records with a held-out split.
// Throws std::invalid_argument on an empty dataset and std::runtime_error
// if the loss diverges.
FitResult fit_transition_model(std::span<const TransitionRecord> dataset, const FitConfig& fit,
                               const game::GameConfig& config);

}  // namespace tow::train
