#pragma once

#include <cstddef>
#include <vector>

#include "covax/evaluator.hpp"

namespace covax {

struct GreedyRound {
  PeptideIndex chosen = 0;
  double gain = 0.0;
  std::size_t evals_after = 0;  // cumulative marginal-gain evaluations
};

struct GreedyResult {
  Genome genome;
  double value = 0.0;  // f(genome), evaluated from scratch
  std::size_t evals_used = 0;
  std::vector<GreedyRound> rounds;
};

/// Gains at or below this are treated as zero and end the selection.
inline constexpr double kGreedyGainFloor = 1e-15;

/// Optivax-P: repeatedly add the non-banned peptide with the largest marginal
/// gain (lowest index on ties) and ban its graph neighbours. Stops after k
/// additions, when no candidate remains, or when the best gain is zero.
inline GreedyResult optivax_p(const Instance& inst, std::size_t k, std::size_t N,
                              unsigned threads = 1) {
  const std::size_t n = inst.peptide_count();
  GreedyResult r;
  r.genome = Genome(n);
  Genome banned(n);
  auto table = HitDistributionTable::empty(inst.genotype_count());

  for (std::size_t round = 0; round < k; ++round) {
    bool found = false;
    PeptideIndex best = 0;
    double best_gain = 0.0;
    for (PeptideIndex v = 0; v < n; ++v) {
      if (r.genome.test(v) || banned.test(v)) continue;
      const double gain = marginal_gain(inst, table, v, N);
      ++r.evals_used;
      if (!found || gain > best_gain) {
        found = true;
        best = v;
        best_gain = gain;
      }
    }
    if (!found || best_gain <= kGreedyGainFloor) break;
    r.genome.set(best);
    for (auto u : inst.graph.neighbors(best)) banned.set(u);
    table = apply_add(table, inst, best);
    r.rounds.push_back({best, best_gain, r.evals_used});
  }
  r.value = eval_from_scratch(inst, r.genome, N, threads).value;
  return r;
}

}  // namespace covax
