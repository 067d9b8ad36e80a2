#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/models/outcome.hpp"
#include "tow/nn/mlp.hpp"

namespace tow::models {

inline constexpr int kDefaultHidden = 128;

// Q(s, a): state features followed by action features, mapped to an
// OutcomeVector for the player whose perspective `s` is written in.
class QFunction {
 public:
  QFunction() = default;
  explicit QFunction(nn::Mlp net);  // throws std::invalid_argument on wrong shape

  static nn::MlpSpec spec(int hidden = kDefaultHidden);
  static QFunction init(std::uint64_t seed, int hidden = kDefaultHidden);

  const nn::Mlp& net() const { return net_; }
  nn::Mlp& net() { return net_; }

  OutcomeVector q_value(const game::AbstractState& s, const game::PlayerAction& a,
                        const game::GameConfig& config) const;
  // All candidates at one state in a single batched pass; clamped.
  std::vector<OutcomeVector> q_values(const game::AbstractState& s, std::span<const game::PlayerAction> candidates,
                                      const game::GameConfig& config) const;

  friend bool operator==(const QFunction&, const QFunction&) = default;

 private:
  nn::Mlp net_;
};

struct RankedAction {
  std::size_t index = 0;  // position in the candidate list
  game::PlayerAction action;
  OutcomeVector value;
};

// Indices of the top-k candidates: agent_value descending, ties broken by
// canonical action order, then by candidate position.
std::vector<std::size_t> rank_order(std::span<const OutcomeVector> values,
                                    std::span<const game::PlayerAction> candidates, std::size_t k);

std::vector<RankedAction> rank_actions(const QFunction& q, const game::AbstractState& s,
                                       std::span<const game::PlayerAction> candidates, std::size_t k,
                                       const game::GameConfig& config);

// Value of the best candidate at `s`. Throws std::invalid_argument if there
// are no candidates.
OutcomeVector evaluate_state(const QFunction& q, const game::AbstractState& s,
                             std::span<const game::PlayerAction> candidates, const game::GameConfig& config);

}  // namespace tow::models
