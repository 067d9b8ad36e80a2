#include "tow/models/outcome.hpp"

#include <algorithm>

namespace tow::models {

OutcomeVector OutcomeVector::clamped() const {
  OutcomeVector out;
  for (int i = 0; i < kOutcomeSize; ++i) out.p[i] = std::clamp(p[i], 0.0, 1.0);
  return out;
}

OutcomeVector OutcomeVector::normalized() const {
  double total = 0;
  for (double v : p) total += v;
  if (total <= 0) return *this;
  OutcomeVector out;
  for (int i = 0; i < kOutcomeSize; ++i) out.p[i] = p[i] / total;
  return out;
}

OutcomeVector OutcomeVector::flipped() const {
  OutcomeVector out;
  for (int i = 0; i < 3; ++i) {
    out.p[i] = p[i + 3];
    out.p[i + 3] = p[i];
  }
  return out;
}

Outcome OutcomeVector::argmax() const {
  return static_cast<Outcome>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::array<double, kOutcomeSize> OutcomeVector::absolute(game::Player perspective) const {
  // Relative and absolute layouts coincide for player one.
  return perspective == game::Player::One ? p : flipped().p;
}

OutcomeVector OutcomeVector::one_hot(Outcome o) {
  OutcomeVector v;
  v[o] = 1.0;
  return v;
}

OutcomeVector OutcomeVector::from_condition(game::WinCondition c, game::Player perspective) {
  return one_hot(relative_outcome(c, perspective));
}

Outcome relative_outcome(game::WinCondition c, game::Player perspective) {
  const int raw = static_cast<int>(c);
  return static_cast<Outcome>(perspective == game::Player::One ? raw : (raw + 3) % 6);
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::SelfDestroysTop: return "self_destroys_top";
    case Outcome::SelfDestroysBottom: return "self_destroys_bottom";
    case Outcome::SelfTimeout: return "self_timeout";
    case Outcome::EnemyDestroysTop: return "enemy_destroys_top";
    case Outcome::EnemyDestroysBottom: return "enemy_destroys_bottom";
    case Outcome::EnemyTimeout: return "enemy_timeout";
  }
  return "?";
}

}  // namespace tow::models
