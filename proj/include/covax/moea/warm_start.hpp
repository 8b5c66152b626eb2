#pragma once

#include <cstddef>
#include <vector>

#include "covax/greedy.hpp"
#include "covax/moea/dominance.hpp"
#include "covax/moea/run.hpp"

namespace covax {

inline constexpr std::size_t kRandomFeasibleRestarts = 50;

/// Independent set of the requested size built by uniform picks among
/// peptides not yet banned. Restarts when stuck; after the last restart the
/// largest set seen is returned.
inline Genome random_feasible(const Instance& inst, std::size_t size, Rng& rng) {
  const std::size_t n = inst.peptide_count();
  Genome best(n);
  std::vector<PeptideIndex> available;
  for (std::size_t attempt = 0; attempt < kRandomFeasibleRestarts; ++attempt) {
    Genome g(n);
    Genome banned(n);
    available.resize(n);
    for (PeptideIndex v = 0; v < n; ++v) available[v] = v;
    while (g.count() < size) {
      std::erase_if(available, [&](PeptideIndex v) { return g.test(v) || banned.test(v); });
      if (available.empty()) break;
      const PeptideIndex pick = available[rng.index(available.size())];
      g.set(pick);
      for (auto u : inst.graph.neighbors(pick)) banned.set(u);
    }
    if (g.count() > best.count() || attempt == 0) best = g;
    if (best.count() == size) break;
  }
  return best;
}

/// Inserts `cand` unless a member strictly dominates it, evicting the members
/// it weakly dominates. Keeps `pop` mutually incomparable.
inline bool insert_nondominated(std::vector<Individual>& pop, Individual&& cand) {
  for (const auto& z : pop) {
    if (dominates(z.objectives, cand.objectives)) return false;
  }
  std::erase_if(pop, [&](const Individual& z) {
    return weakly_dominates(cand.objectives, z.objectives);
  });
  pop.push_back(std::move(cand));
  return true;
}

struct WarmStart {
  std::vector<Individual> members;
  double greedy_f = 0.0;
  std::size_t greedy_evals = 0;
  std::size_t evaluations = 0;  // coverage evaluations of the seeded members
};

/// Greedy output as the size-k seed, then `copies_per_size` random feasible
/// solutions for each size 0..k-1. With `filter_nondominated` the candidates
/// are merged in generation order keeping only non-dominated ones.
inline WarmStart warm_start(const CoverageObjective& objective, std::size_t copies_per_size,
                            Rng& rng, bool filter_nondominated) {
  const Instance& inst = objective.instance();
  WarmStart ws;
  const auto greedy = optivax_p(inst, objective.k(), objective.N(), objective.threads());
  ws.greedy_f = greedy.value;
  ws.greedy_evals = greedy.evals_used;

  auto evaluate = [&](Genome g) {
    auto r = objective.bi_objective(g);
    if (r.evaluated()) ++ws.evaluations;
    return make_individual(std::move(g), std::move(r), 0);
  };
  ws.members.push_back(evaluate(greedy.genome));
  for (std::size_t size = 0; size < objective.k(); ++size) {
    for (std::size_t c = 0; c < copies_per_size; ++c) {
      auto ind = evaluate(random_feasible(inst, size, rng));
      if (filter_nondominated) {
        insert_nondominated(ws.members, std::move(ind));
      } else {
        ws.members.push_back(std::move(ind));
      }
    }
  }
  return ws;
}

}  // namespace covax
