#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "covax/evaluator.hpp"
#include "covax/rng.hpp"

namespace covax {

/// Flips each bit independently with probability 1/n.
inline Genome bitwise_mutation(const Genome& g, Rng& rng) {
  Genome out = g;
  const std::size_t n = g.size();
  if (n == 0) return out;
  const double rate = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < rate) out.flip(i);
  }
  return out;
}

/// Exchanges the suffixes starting at `cut` (1 <= cut < n).
inline std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, std::size_t cut) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: length mismatch");
  Genome c1 = a, c2 = b;
  for (std::size_t i = cut; i < a.size(); ++i) {
    c1.assign(i, b.test(i));
    c2.assign(i, a.test(i));
  }
  return {std::move(c1), std::move(c2)};
}

/// With probability `rate` picks a cut uniformly in 1..n-1 and swaps
/// suffixes; otherwise returns copies.
inline std::pair<Genome, Genome> one_point_crossover(const Genome& a, const Genome& b, Rng& rng,
                                                     double rate = 0.9) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: length mismatch");
  if (a.size() < 2 || !rng.bernoulli(rate)) return {a, b};
  return crossover_at(a, b, 1 + rng.index(a.size() - 1));
}

/// Scans bits in ascending order; for each bit set in the offspring but not
/// in the parent, keeps one uniformly random member of {i} plus its selected
/// neighbours and clears the rest. Parent bits can lose that draw. The size
/// constraint is not touched. Offspring without conflicts come back unchanged.
inline Genome repair(const Genome& parent, Genome offspring, const Graph& graph, Rng& rng) {
  if (parent.size() != offspring.size()) throw std::invalid_argument("repair: length mismatch");
  if (count_violations(parent, graph) != 0) {
    throw std::invalid_argument("repair: parent violates pairwise constraints");
  }
  std::vector<PeptideIndex> q;
  for (PeptideIndex i = 0; i < offspring.size(); ++i) {
    if (!offspring.test(i) || parent.test(i)) continue;
    q.clear();
    for (auto j : graph.neighbors(i)) {
      if (offspring.test(j)) q.push_back(j);
    }
    if (q.empty()) continue;
    q.insert(std::lower_bound(q.begin(), q.end(), i), i);
    const PeptideIndex keep = q[rng.index(q.size())];
    for (auto j : q) {
      if (j != keep) offspring.reset(j);
    }
  }
  return offspring;
}

}  // namespace covax
