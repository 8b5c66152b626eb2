#pragma once

#include <functional>
#include <string>
#include <vector>

#include "covax/moea/dominance.hpp"
#include "covax/moea/operators.hpp"
#include "covax/moea/run.hpp"
#include "covax/moea/warm_start.hpp"

namespace covax {

/// GSEMO population: mutually incomparable feasible solutions, hence at most
/// one per cardinality.
class GsemoArchive {
 public:
  /// Inserted iff no member strictly dominates the candidate; members the
  /// candidate weakly dominates are evicted.
  bool offer(Individual cand) { return insert_nondominated(members_, std::move(cand)); }

  const std::vector<Individual>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  /// Empty string when the archive invariants hold, otherwise a description.
  std::string check_invariants(const CoverageObjective& objective) const {
    if (members_.size() > objective.k() + 1) return "more than k+1 members";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const auto& a = members_[i];
      if (!a.feasible() || !objective.feasible(a.genome)) return "infeasible member";
      if (!a.table || a.table->support() != a.genome.indices()) return "table/genome mismatch";
      for (std::size_t j = i + 1; j < members_.size(); ++j) {
        const auto& b = members_[j];
        if (compare(a.objectives, b.objectives) != Dominance::incomparable) {
          return "comparable members";
        }
        if (a.size() == b.size()) return "two members of equal cardinality";
      }
    }
    return {};
  }

 private:
  std::vector<Individual> members_;
};

struct GsemoOptions {
  bool warm = true;
  bool repair = true;
  /// Called after every iteration with the archive and the iteration number.
  std::function<void(const GsemoArchive&, std::size_t)> on_iteration;
};

struct GsemoResult {
  Trace trace;
  GsemoArchive archive;
};

inline std::string gsemo_label(const GsemoOptions& opt) {
  std::string s = "gsemo";
  if (opt.warm || opt.repair) s += '-';
  if (opt.warm) s += 'w';
  if (opt.repair) s += 'r';
  return s;
}

/// GSEMO on (f1, f2): uniform parent choice, bit-wise mutation, optional
/// repair, archive update. Offspring tables derive incrementally from the
/// parent's. Runs until eval_budget feasible evaluations (or max_iterations).
inline GsemoResult run_gsemo(const Instance& inst, const RunParams& raw_params,
                             const GsemoOptions& opt = {}) {
  const RunParams params = raw_params.normalized(inst.peptide_count());
  const CoverageObjective objective(inst, params.k, params.N, params.threads);
  RngStreams rng(params.seed);
  GsemoResult out;
  out.trace.seed = params.seed;
  out.trace.config = gsemo_label(opt);

  std::vector<Individual> init;
  if (opt.warm) {
    auto ws = warm_start(objective, 1, rng.warm_start, true);
    out.trace.warm_start_f = ws.greedy_f;
    out.trace.warm_start_evals = ws.greedy_evals + ws.evaluations;
    init = std::move(ws.members);
  } else {
    Genome empty(inst.peptide_count());
    init.push_back(make_individual(empty, objective.bi_objective(empty), 0));
  }
  for (auto& ind : init) out.archive.offer(std::move(ind));
  {
    const auto& b = best_feasible(out.archive.members());
    out.trace.observe(0, b.objectives.f1, b.size());
  }

  std::size_t evals = 0;
  std::size_t iter = 0;
  while (evals < params.eval_budget &&
         (params.max_iterations == 0 || iter < params.max_iterations)) {
    ++iter;
    const auto& members = out.archive.members();
    const Individual& parent = members[rng.selection.index(members.size())];
    Genome child = bitwise_mutation(parent.genome, rng.mutation);
    if (opt.repair) child = repair(parent.genome, std::move(child), inst.graph, rng.repair);
    auto res = objective.bi_objective(child, &*parent.table);
    if (res.evaluated()) {
      ++evals;
      out.trace.observe(evals, res.objectives.f1, child.count());
      out.archive.offer(make_individual(std::move(child), std::move(res), evals));
    }
    if (opt.on_iteration) opt.on_iteration(out.archive, iter);
  }
  out.trace.iterations = iter;
  out.trace.close(evals, best_feasible(out.archive.members()));
  return out;
}

}  // namespace covax
