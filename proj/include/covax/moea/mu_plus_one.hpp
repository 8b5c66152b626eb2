#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "covax/moea/operators.hpp"
#include "covax/moea/run.hpp"
#include "covax/moea/warm_start.hpp"

namespace covax {

struct MuPlusOneOptions {
  std::size_t mu = 0;  // 0 = k+1
  bool warm = true;
  bool repair = true;
};

struct MuPlusOneResult {
  Trace trace;
  std::vector<Individual> population;
};

inline std::string mu_plus_one_label(const MuPlusOneOptions& opt, std::size_t mu) {
  std::string s = "mu1ea";
  if (opt.warm || opt.repair) s += '-';
  if (opt.warm) s += 'w';
  if (opt.repair) s += 'r';
  return s + ":mu=" + std::to_string(mu);
}

/// Single-objective (mu+1)-EA sharing GSEMO's initialization and variation;
/// survival keeps the mu best by f (then smaller size, then genome order).
inline MuPlusOneResult run_mu_plus_one_ea(const Instance& inst, const RunParams& raw_params,
                                          const MuPlusOneOptions& opt = {}) {
  const RunParams params = raw_params.normalized(inst.peptide_count());
  const std::size_t mu = opt.mu == 0 ? params.k + 1 : opt.mu;
  const CoverageObjective objective(inst, params.k, params.N, params.threads);
  RngStreams rng(params.seed);
  MuPlusOneResult out;
  out.trace.seed = params.seed;
  out.trace.config = mu_plus_one_label(opt, mu);

  auto& pop = out.population;
  if (opt.warm) {
    auto ws = warm_start(objective, 1, rng.warm_start, false);
    out.trace.warm_start_f = ws.greedy_f;
    out.trace.warm_start_evals = ws.greedy_evals + ws.evaluations;
    pop = std::move(ws.members);
  } else {
    Genome empty(inst.peptide_count());
    pop.push_back(make_individual(empty, objective.bi_objective(empty), 0));
  }
  while (pop.size() < mu) {
    Genome g = random_feasible(inst, rng.warm_start.index(params.k + 1), rng.warm_start);
    auto r = objective.bi_objective(g);
    if (r.evaluated()) ++out.trace.warm_start_evals;
    pop.push_back(make_individual(std::move(g), std::move(r), 0));
  }
  std::stable_sort(pop.begin(), pop.end(), better_solution);
  pop.resize(mu);
  out.trace.observe(0, pop.front().objectives.f1, pop.front().size());

  std::size_t evals = 0;
  std::size_t iter = 0;
  while (evals < params.eval_budget &&
         (params.max_iterations == 0 || iter < params.max_iterations)) {
    ++iter;
    const Individual& parent = pop[rng.selection.index(pop.size())];
    Genome child = bitwise_mutation(parent.genome, rng.mutation);
    if (opt.repair) child = repair(parent.genome, std::move(child), inst.graph, rng.repair);
    auto res = objective.bi_objective(child, &*parent.table);
    if (!res.evaluated()) continue;
    ++evals;
    out.trace.observe(evals, res.objectives.f1, child.count());
    Individual ind = make_individual(std::move(child), std::move(res), evals);
    auto pos = std::upper_bound(pop.begin(), pop.end(), ind, better_solution);
    pop.insert(pos, std::move(ind));
    pop.pop_back();
  }
  out.trace.iterations = iter;
  out.trace.close(evals, best_feasible(pop));
  return out;
}

}  // namespace covax
