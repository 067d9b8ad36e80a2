#pragma once

#include <array>
#include <cstddef>

#include "tow/game/types.hpp"

namespace tow::models {

inline constexpr int kOutcomeSize = 6;

// Components of an OutcomeVector, relative to the agent that owns it.
enum class Outcome : int {
  SelfDestroysTop = 0,     // agent destroys the enemy's top base
  SelfDestroysBottom = 1,  // agent destroys the enemy's bottom base
  SelfTimeout = 2,
  EnemyDestroysTop = 3,  // enemy destroys the agent's top base
  EnemyDestroysBottom = 4,
  EnemyTimeout = 5,
};

// Per-win-condition probabilities seen from one player. Components are kept
// in [0,1] but not forced onto the simplex; use normalized() for display.
struct OutcomeVector {
  std::array<double, kOutcomeSize> p{};

  double& operator[](Outcome o) { return p[static_cast<std::size_t>(o)]; }
  double operator[](Outcome o) const { return p[static_cast<std::size_t>(o)]; }

  // Sum of the agent's three winning components.
  double agent_value() const { return p[0] + p[1] + p[2]; }
  double enemy_value() const { return p[3] + p[4] + p[5]; }
  OutcomeVector clamped() const;
  OutcomeVector normalized() const;  // sums to 1 unless all zero
  OutcomeVector flipped() const;     // the same prediction from the other side
  Outcome argmax() const;            // lowest index wins ties

  // Indexed by game::WinCondition for an agent playing `perspective`.
  std::array<double, kOutcomeSize> absolute(game::Player perspective) const;

  static OutcomeVector one_hot(Outcome o);
  static OutcomeVector from_condition(game::WinCondition c, game::Player perspective);

  friend bool operator==(const OutcomeVector&, const OutcomeVector&) = default;
};

Outcome relative_outcome(game::WinCondition c, game::Player perspective);
const char* to_string(Outcome o);

}  // namespace tow::models
