#pragma once

#include <cstddef>
#include <vector>

#include "tow/game/abstraction.hpp"
#include "tow/game/rng.hpp"
#include "tow/models/outcome.hpp"

namespace tow::train {

// One wave from one player's perspective. The reward is zero unless the
// wave ended the game, where it is the one-hot win condition.
struct TransitionRecord {
  game::AbstractState s;
  game::PlayerAction friendly;
  game::PlayerAction enemy;
  game::AbstractState next;
  models::OutcomeVector reward;
  bool terminal = false;

  friend bool operator==(const TransitionRecord&, const TransitionRecord&) = default;
};

// Bounded FIFO: once full, each insertion evicts the oldest record.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(TransitionRecord record);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const TransitionRecord& at(std::size_t i) const;  // 0 is the oldest
  // Uniform sampling with replacement.
  std::vector<TransitionRecord> sample(std::size_t n, game::SplitMix64& rng) const;
  std::vector<TransitionRecord> contents() const;  // oldest first

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest slot once full
  std::vector<TransitionRecord> data_;
};

}  // namespace tow::train
