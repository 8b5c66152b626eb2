#pragma once

#include "covax/evaluator.hpp"

namespace covax {

/// Outcome of comparing a against b, both objectives maximized.
enum class Dominance {
  dominates,     // a weakly dominates b and is strictly better somewhere
  equal,         // a and b weakly dominate each other
  dominated,     // b dominates a
  incomparable,  // neither weakly dominates the other
};

inline bool weakly_dominates(const ObjectivePair& a, const ObjectivePair& b) noexcept {
  return a.f1 >= b.f1 && a.f2 >= b.f2;
}

inline bool dominates(const ObjectivePair& a, const ObjectivePair& b) noexcept {
  return weakly_dominates(a, b) && (a.f1 > b.f1 || a.f2 > b.f2);
}

inline Dominance compare(const ObjectivePair& a, const ObjectivePair& b) noexcept {
  const bool ab = weakly_dominates(a, b);
  const bool ba = weakly_dominates(b, a);
  if (ab && ba) return Dominance::equal;
  if (ab) return Dominance::dominates;
  if (ba) return Dominance::dominated;
  return Dominance::incomparable;
}

}  // namespace covax
