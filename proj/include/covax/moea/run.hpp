#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "covax/evaluator.hpp"
#include "covax/rng.hpp"

namespace covax {

struct RunParams {
  std::size_t k = 1;
  std::size_t N = 1;
  std::uint64_t seed = 0;
  std::size_t eval_budget = 1;     // feasible coverage evaluations
  std::size_t max_iterations = 0;  // 0 = bounded by the evaluation budget only
  unsigned threads = 1;            // evaluation workers

  /// N above k is inert (min{Y, N} with Y <= k), so it is clamped.
  RunParams normalized(std::size_t n) const {
    if (k == 0 || k > n) throw std::invalid_argument("RunParams: need 1 <= k <= n");
    if (eval_budget == 0) throw std::invalid_argument("RunParams: eval_budget must be positive");
    RunParams p = *this;
    p.N = std::min(N, k);
    return p;
  }
};

struct Individual {
  Genome genome;
  ObjectivePair objectives;
  std::optional<HitDistributionTable> table;  // present iff feasible
  std::size_t birth_eval = 0;

  bool feasible() const noexcept { return objectives.f1 >= 0.0; }
  std::size_t size() const noexcept { return genome.count(); }
};

inline Individual make_individual(Genome genome, BiObjectiveResult result, std::size_t birth) {
  return Individual{std::move(genome), result.objectives, std::move(result.table), birth};
}

/// Largest f1 first, then smaller sets, then the lexicographically smaller
/// genome.
inline bool better_solution(const Individual& a, const Individual& b) {
  if (a.objectives.f1 != b.objectives.f1) return a.objectives.f1 > b.objectives.f1;
  if (a.size() != b.size()) return a.size() < b.size();
  return lexicographically_less(a.genome, b.genome);
}

/// The best feasible member; never an f1 = -1 individual.
inline const Individual& best_feasible(std::span<const Individual> pop) {
  const Individual* best = nullptr;
  for (const auto& ind : pop) {
    if (!ind.feasible()) continue;
    if (best == nullptr || better_solution(ind, *best)) best = &ind;
  }
  if (best == nullptr) throw std::logic_error("best_feasible: no feasible member");
  return *best;
}

struct TraceRecord {
  std::size_t evals = 0;
  double best_f = 0.0;
  std::size_t best_size = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Anytime record of one run: a row whenever the best feasible f improves,
/// plus a closing row when the budget runs out.
struct Trace {
  std::uint64_t seed = 0;
  std::string config;
  std::vector<TraceRecord> records;
  std::optional<double> warm_start_f;
  std::size_t warm_start_evals = 0;
  std::size_t evals_used = 0;
  std::size_t iterations = 0;
  Genome final_genome;
  double final_f = 0.0;

  void observe(std::size_t evals, double f, std::size_t size) {
    if (records.empty() || f > records.back().best_f) {
      if (!records.empty() && records.back().evals == evals) {
        records.back() = {evals, f, size};
      } else {
        records.push_back({evals, f, size});
      }
    }
  }

  void close(std::size_t evals, const Individual& best) {
    evals_used = evals;
    final_genome = best.genome;
    final_f = best.objectives.f1;
    observe(evals, best.objectives.f1, best.size());
    if (records.back().evals < evals) {
      records.push_back({evals, records.back().best_f, records.back().best_size});
    }
  }
};

/// Independent named streams so toggling one mechanism leaves the others'
/// draws untouched.
struct RngStreams {
  explicit RngStreams(std::uint64_t seed)
      : warm_start(Rng::stream(seed, "warm-start")),
        selection(Rng::stream(seed, "parent-selection")),
        mutation(Rng::stream(seed, "mutation")),
        crossover(Rng::stream(seed, "crossover")),
        repair(Rng::stream(seed, "repair")) {}

  Rng warm_start;
  Rng selection;
  Rng mutation;
  Rng crossover;
  Rng repair;
};

}  // namespace covax
