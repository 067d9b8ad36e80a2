#include "tow/models/q_function.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tow/models/features.hpp"

namespace tow::models {

QFunction::QFunction(nn::Mlp net) : net_(std::move(net)) {
  if (net_.spec().inputs() != kStateFeatures + kActionFeatures || net_.spec().outputs() != kOutcomeSize) {
    throw std::invalid_argument("QFunction: network must map 74 features to 6 outcomes");
  }
}

nn::MlpSpec QFunction::spec(int hidden) {
  return nn::MlpSpec{{kStateFeatures + kActionFeatures, hidden, hidden, kOutcomeSize}};
}

QFunction QFunction::init(std::uint64_t seed, int hidden) { return QFunction(nn::Mlp::init(spec(hidden), seed)); }

OutcomeVector QFunction::q_value(const game::AbstractState& s, const game::PlayerAction& a,
                                 const game::GameConfig& config) const {
  return q_values(s, std::span(&a, 1), config).front();
}

std::vector<OutcomeVector> QFunction::q_values(const game::AbstractState& s,
                                               std::span<const game::PlayerAction> candidates,
                                               const game::GameConfig& config) const {
  if (candidates.empty()) return {};
  Eigen::MatrixXd actions(kActionFeatures, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    actions.col(static_cast<Eigen::Index>(i)) = encode_action(candidates[i], config);
  }
  const Eigen::MatrixXd out = net_.forward_batch_shared(encode_state(s, config), actions);
  std::vector<OutcomeVector> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (int c = 0; c < kOutcomeSize; ++c) values[i].p[c] = out(c, static_cast<Eigen::Index>(i));
    values[i] = values[i].clamped();
  }
  return values;
}

std::vector<std::size_t> rank_order(std::span<const OutcomeVector> values,
                                    std::span<const game::PlayerAction> candidates, std::size_t k) {
  if (values.size() != candidates.size()) throw std::invalid_argument("rank_order: size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> score(values.size());
  std::vector<game::PlayerAction> canon(candidates.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    score[i] = values[i].agent_value();
    canon[i] = candidates[i].canonical();
  }
  auto better = [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    if (canon[a] != canon[b]) return canon[a] < canon[b];
    return a < b;
  };
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
  order.resize(n);
  return order;
}

std::vector<RankedAction> rank_actions(const QFunction& q, const game::AbstractState& s,
                                       std::span<const game::PlayerAction> candidates, std::size_t k,
                                       const game::GameConfig& config) {
  const auto values = q.q_values(s, candidates, config);
  std::vector<RankedAction> ranked;
  for (std::size_t i : rank_order(values, candidates, k)) ranked.push_back({i, candidates[i], values[i]});
  return ranked;
}

OutcomeVector evaluate_state(const QFunction& q, const game::AbstractState& s,
                             std::span<const game::PlayerAction> candidates, const game::GameConfig& config) {
  if (candidates.empty()) throw std::invalid_argument("evaluate_state: no candidate actions");
  const auto values = q.q_values(s, candidates, config);
  return values[rank_order(values, candidates, 1).front()];
}

}  // namespace tow::models
