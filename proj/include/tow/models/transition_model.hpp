#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/models/features.hpp"
#include "tow/models/outcome.hpp"
#include "tow/models/q_function.hpp"
#include "tow/nn/mlp.hpp"

namespace tow::models {

struct TransitionPrediction {
  game::AbstractState state;
  OutcomeVector reward;
};

using ActionPair = std::pair<game::PlayerAction, game::PlayerAction>;  // (friendly, enemy)

// Deterministic one-wave model. The network reads state features, the
// friendly action and the enemy action, and predicts the change in state
// features followed by the reward head.
class TransitionModel {
 public:
  static constexpr int kInputs = kStateFeatures + 2 * kActionFeatures;  // 80
  static constexpr int kOutputs = kStateFeatures + kOutcomeSize;        // 74

  TransitionModel() = default;
  explicit TransitionModel(nn::Mlp net);  // throws std::invalid_argument on wrong shape

  static nn::MlpSpec spec(int hidden = kDefaultHidden);
  static TransitionModel init(std::uint64_t seed, int hidden = kDefaultHidden);

  const nn::Mlp& net() const { return net_; }
  nn::Mlp& net() { return net_; }

  static Eigen::VectorXd input(const game::AbstractState& s, const game::PlayerAction& friendly,
                               const game::PlayerAction& enemy, const game::GameConfig& config);
  // Regression target for one observed transition.
  static Eigen::VectorXd target(const game::AbstractState& s, const game::AbstractState& next,
                                const OutcomeVector& reward, const game::GameConfig& config);
  // Turns a raw network output for `s` into a clamped, rounded prediction;
  // the wave always advances by one.
  static TransitionPrediction decode(const game::AbstractState& s, const Eigen::Ref<const Eigen::VectorXd>& output,
                                     const game::GameConfig& config);

  TransitionPrediction predict(const game::AbstractState& s, const game::PlayerAction& friendly,
                               const game::PlayerAction& enemy, const game::GameConfig& config) const;
  std::vector<TransitionPrediction> predict_batch(const game::AbstractState& s, std::span<const ActionPair> pairs,
                                                  const game::GameConfig& config) const;

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:
  nn::Mlp net_;
};

}  // namespace tow::models
