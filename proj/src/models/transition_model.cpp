#include "tow/models/transition_model.hpp"

#include <stdexcept>

#include "tow/models/features.hpp"

namespace tow::models {

TransitionModel::TransitionModel(nn::Mlp net) : net_(std::move(net)) {
  if (net_.spec().inputs() != kInputs || net_.spec().outputs() != kOutputs) {
    throw std::invalid_argument("TransitionModel: network must map 80 features to 74 outputs");
  }
}

nn::MlpSpec TransitionModel::spec(int hidden) { return nn::MlpSpec{{kInputs, hidden, hidden, kOutputs}}; }

TransitionModel TransitionModel::init(std::uint64_t seed, int hidden) {
  return TransitionModel(nn::Mlp::init(spec(hidden), seed));
}

Eigen::VectorXd TransitionModel::input(const game::AbstractState& s, const game::PlayerAction& friendly,
                                       const game::PlayerAction& enemy, const game::GameConfig& config) {
  Eigen::VectorXd x(kInputs);
  x << encode_state(s, config), encode_action(friendly, config), encode_action(enemy, config);
  return x;
}

Eigen::VectorXd TransitionModel::target(const game::AbstractState& s, const game::AbstractState& next,
                                        const OutcomeVector& reward, const game::GameConfig& config) {
  Eigen::VectorXd y(kOutputs);
  y.head(kStateFeatures) = encode_state(next, config) - encode_state(s, config);
  for (int c = 0; c < kOutcomeSize; ++c) y(kStateFeatures + c) = reward.p[c];
  return y;
}

TransitionPrediction TransitionModel::decode(const game::AbstractState& s,
                                             const Eigen::Ref<const Eigen::VectorXd>& output,
                                             const game::GameConfig& config) {
  if (output.size() != kOutputs) throw std::invalid_argument("TransitionModel::decode: output size mismatch");
  const Eigen::VectorXd features = encode_state(s, config) + output.head(kStateFeatures);
  TransitionPrediction p;
  p.state = decode_state(features, config);
  p.state.wave = s.wave + 1;
  for (int c = 0; c < kOutcomeSize; ++c) p.reward.p[c] = output(kStateFeatures + c);
  p.reward = p.reward.clamped();
  return p;
}

TransitionPrediction TransitionModel::predict(const game::AbstractState& s, const game::PlayerAction& friendly,
                                              const game::PlayerAction& enemy, const game::GameConfig& config) const {
  const ActionPair pair{friendly, enemy};
  return predict_batch(s, std::span(&pair, 1), config).front();
}

std::vector<TransitionPrediction> TransitionModel::predict_batch(const game::AbstractState& s,
                                                                 std::span<const ActionPair> pairs,
                                                                 const game::GameConfig& config) const {
  if (pairs.empty()) return {};
  Eigen::MatrixXd actions(2 * kActionFeatures, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    actions.col(col).head(kActionFeatures) = encode_action(pairs[i].first, config);
    actions.col(col).tail(kActionFeatures) = encode_action(pairs[i].second, config);
  }
  const Eigen::MatrixXd out = net_.forward_batch_shared(encode_state(s, config), actions);
  std::vector<TransitionPrediction> predictions;
  predictions.reserve(pairs.size());
  for (Eigen::Index i = 0; i < out.cols(); ++i) predictions.push_back(decode(s, out.col(i), config));
  return predictions;
}

}  // namespace tow::models
