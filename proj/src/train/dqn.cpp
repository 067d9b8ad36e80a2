#include "tow/train/dqn.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "tow/models/features.hpp"

namespace tow::train {

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("TrainConfig: gamma must lie in (0,1]");
  if (!(win_rate_threshold > 0.0 && win_rate_threshold < 1.0)) {
    throw std::invalid_argument("TrainConfig: win-rate threshold must lie in (0,1)");
  }
  if (learning_rate < 0 || batch_size < 1 || buffer_capacity < 1 || target_sync < 1 || max_steps < 1 ||
      max_games < 0 || win_rate_window < 1 || update_every < 1 || hidden < 1 || log_every < 1) {
    throw std::invalid_argument("TrainConfig: sizes and budgets must be positive");
  }
  if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 || epsilon_end > 1) {
    throw std::invalid_argument("TrainConfig: epsilon must lie in [0,1]");
  }
}

double TrainConfig::epsilon_at(long long step) const {
  const double horizon = std::max(1.0, max_steps / 2.0);
  const double t = std::min(1.0, static_cast<double>(step) / horizon);
  return epsilon_start + (epsilon_end - epsilon_start) * t;
}

DqnTargets dr_dqn_targets(std::span<const TransitionRecord> batch, const models::QFunction& online,
                          const models::QFunction& target, double gamma, const search::ActionSource& next_actions,
                          const game::GameConfig& config) {
  DqnTargets out;
  out.targets.resize(models::kOutcomeSize, static_cast<Eigen::Index>(batch.size()));
  out.next_best.resize(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TransitionRecord& r = batch[i];
    const auto col = static_cast<Eigen::Index>(i);
    for (int c = 0; c < models::kOutcomeSize; ++c) out.targets(c, col) = r.reward.p[c];
    if (r.terminal) continue;
    const auto options = next_actions(r.next.own_currency, r.next.pylons[game::kSelf]);
    const auto values = online.q_values(r.next, options, config);
    const auto best = options[models::rank_order(values, options, 1).front()];
    out.next_best[i] = best;
    const auto bootstrap = target.q_value(r.next, best, config);
    for (int c = 0; c < models::kOutcomeSize; ++c) out.targets(c, col) += gamma * bootstrap.p[c];
  }
  return out;
}

std::vector<double> scalar_dqn_targets(std::span<const TransitionRecord> batch, const models::QFunction& target,
                                       double gamma, std::span<const game::PlayerAction> next_best,
                                       const game::GameConfig& config) {
  std::vector<double> out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double y = 0;
    for (double v : batch[i].reward.p) y += v;
    if (!batch[i].terminal) {
      double q = 0;
      for (double v : target.q_value(batch[i].next, next_best[i], config).p) q += v;
      y += gamma * q;
    }
    out.push_back(y);
  }
  return out;
}

double q_update(models::QFunction& online, nn::Adam& optimizer, std::span<const TransitionRecord> batch,
                const Eigen::MatrixXd& targets, const game::GameConfig& config) {
  Eigen::MatrixXd inputs(models::kStateFeatures + models::kActionFeatures, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    inputs.col(col).head(models::kStateFeatures) = models::encode_state(batch[i].s, config);
    inputs.col(col).tail(models::kActionFeatures) = models::encode_action(batch[i].friendly, config);
  }
  return nn::train_step(online.net(), optimizer, inputs, targets);
}

void write_log(std::ostream& out, std::span<const TrainLogEntry> log) {
  for (const auto& e : log) {
    out << nlohmann::json{{"step", e.step},       {"games", e.games},       {"updates", e.updates},
                          {"loss", e.loss},       {"win_rate", e.win_rate}, {"epsilon", e.epsilon}}
               .dump()
        << '\n';
  }
}

}  // namespace tow::train
