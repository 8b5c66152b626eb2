#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "covax/moea/dominance.hpp"
#include "covax/moea/operators.hpp"
#include "covax/moea/run.hpp"
#include "covax/moea/warm_start.hpp"

namespace covax {

/// Fast non-dominated sorting. Front r holds the members left non-dominated
/// once fronts 0..r-1 are removed; indices within a front are ascending.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(
    std::span<const ObjectivePair> points) {
  const std::size_t p = points.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(p);
  std::vector<std::size_t> domination_count(p, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (dominates(points[i], points[j])) {
        dominated_by_me[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated_by_me[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (domination_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto i : current) {
      for (auto j : dominated_by_me[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

/// Crowding distance of each front member (result aligned with `front`).
/// Per objective the members are stably sorted by value; the two ends get
/// +inf and interior members add the neighbour gap over the objective range.
inline std::vector<double> crowding_distance(std::span<const ObjectivePair> points,
                                             std::span<const std::size_t> front) {
  const std::size_t f = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(f, 0.0);
  if (f <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  std::vector<std::size_t> order(f);
  for (double ObjectivePair::*obj : {&ObjectivePair::f1, &ObjectivePair::f2}) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[front[a]].*obj < points[front[b]].*obj;
    });
    const double lo = points[front[order.front()]].*obj;
    const double hi = points[front[order.back()]].*obj;
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    if (!(hi > lo)) continue;
    for (std::size_t r = 1; r + 1 < f; ++r) {
      const double gap = points[front[order[r + 1]]].*obj - points[front[order[r - 1]]].*obj;
      dist[order[r]] += gap / (hi - lo);
    }
  }
  return dist;
}

struct RankedMember {
  std::size_t index = 0;
  std::size_t rank = 0;
  double crowding = 0.0;
};

/// NSGA-II environmental selection: whole fronts while they fit, then the
/// split front by descending crowding distance (stable on index).
inline std::vector<RankedMember> select_survivors(std::span<const ObjectivePair> points,
                                                  std::size_t target) {
  std::vector<RankedMember> out;
  const auto fronts = non_dominated_sort(points);
  for (std::size_t r = 0; r < fronts.size() && out.size() < target; ++r) {
    const auto dist = crowding_distance(points, fronts[r]);
    std::vector<RankedMember> ranked;
    for (std::size_t i = 0; i < fronts[r].size(); ++i) ranked.push_back({fronts[r][i], r, dist[i]});
    if (out.size() + ranked.size() > target) {
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const RankedMember& a, const RankedMember& b) {
                         return a.crowding > b.crowding;
                       });
      ranked.resize(target - out.size());
    }
    out.insert(out.end(), ranked.begin(), ranked.end());
  }
  return out;
}

struct Nsga2Population {
  std::vector<Individual> members;
  std::vector<std::size_t> rank;
  std::vector<double> crowding;
};

struct Nsga2Options {
  std::size_t pop_size = 0;  // 0 = 2(k+1)
  bool warm = true;
  bool repair = true;
  double crossover_rate = 0.9;
};

struct Nsga2Result {
  Trace trace;
  Nsga2Population population;
};

namespace detail {

inline Nsga2Population survivors_of(std::vector<Individual> pool, std::size_t target) {
  std::vector<ObjectivePair> pts;
  pts.reserve(pool.size());
  for (const auto& ind : pool) pts.push_back(ind.objectives);
  Nsga2Population pop;
  for (const auto& s : select_survivors(pts, target)) {
    pop.members.push_back(std::move(pool[s.index]));
    pop.rank.push_back(s.rank);
    pop.crowding.push_back(s.crowding);
  }
  return pop;
}

}  // namespace detail

inline std::string nsga2_label(const Nsga2Options& opt, std::size_t pop_size) {
  std::string s = "nsga2";
  if (opt.warm || opt.repair) s += '-';
  if (opt.warm) s += 'w';
  if (opt.repair) s += 'r';
  return s + ":pop=" + std::to_string(pop_size);
}

/// NSGA-II with warm start (two seeds per size, topped up with random
/// feasible solutions), binary tournament on (rank, crowding), one-point
/// crossover, bit-wise mutation on every offspring, and repair. Crossover
/// offspring are derived incrementally from the nearer parent when it lies
/// within k/2 flips, otherwise evaluated from scratch.
inline Nsga2Result run_nsga2(const Instance& inst, const RunParams& raw_params,
                             const Nsga2Options& opt = {}) {
  const RunParams params = raw_params.normalized(inst.peptide_count());
  const std::size_t pop_size = opt.pop_size == 0 ? 2 * (params.k + 1) : opt.pop_size;
  if (pop_size < 4 || pop_size % 2 != 0) {
    throw std::invalid_argument("run_nsga2: pop_size must be even and at least 4");
  }
  const CoverageObjective objective(inst, params.k, params.N, params.threads);
  RngStreams rng(params.seed);
  Nsga2Result out;
  out.trace.seed = params.seed;
  out.trace.config = nsga2_label(opt, pop_size);

  std::vector<Individual> init;
  if (opt.warm) {
    auto ws = warm_start(objective, 2, rng.warm_start, false);
    out.trace.warm_start_f = ws.greedy_f;
    out.trace.warm_start_evals = ws.greedy_evals + ws.evaluations;
    init = std::move(ws.members);
  } else {
    Genome empty(inst.peptide_count());
    init.push_back(make_individual(empty, objective.bi_objective(empty), 0));
  }
  while (init.size() < pop_size) {
    const std::size_t size = rng.warm_start.index(params.k + 1);
    Genome g = random_feasible(inst, size, rng.warm_start);
    auto r = objective.bi_objective(g);
    if (r.evaluated()) ++out.trace.warm_start_evals;
    init.push_back(make_individual(std::move(g), std::move(r), 0));
  }
  out.population = detail::survivors_of(std::move(init), pop_size);
  {
    const auto& b = best_feasible(out.population.members);
    out.trace.observe(0, b.objectives.f1, b.size());
  }

  auto& pop = out.population;
  auto tournament = [&]() -> std::size_t {
    const std::size_t a = rng.selection.index(pop.members.size());
    const std::size_t b = rng.selection.index(pop.members.size());
    if (pop.rank[b] < pop.rank[a] ||
        (pop.rank[b] == pop.rank[a] && pop.crowding[b] > pop.crowding[a])) {
      return b;
    }
    return a;
  };

  std::size_t evals = 0;
  std::size_t iter = 0;
  auto budget_left = [&] {
    return evals < params.eval_budget &&
           (params.max_iterations == 0 || iter < params.max_iterations);
  };
  while (budget_left()) {
    std::vector<Individual> offspring;
    offspring.reserve(pop_size);
    while (offspring.size() < pop_size && budget_left()) {
      const std::size_t ia = tournament();
      const std::size_t ib = tournament();
      const Individual& pa = pop.members[ia];
      const Individual& pb = pop.members[ib];
      auto [c1, c2] = one_point_crossover(pa.genome, pb.genome, rng.crossover, opt.crossover_rate);
      const std::pair<Genome*, const Individual*> pairs[] = {{&c1, &pa}, {&c2, &pb}};
      for (const auto& [child_ptr, prefix_parent] : pairs) {
        if (offspring.size() >= pop_size || !budget_left()) break;
        ++iter;
        Genome child = bitwise_mutation(*child_ptr, rng.mutation);
        if (opt.repair) {
          child = repair(prefix_parent->genome, std::move(child), inst.graph, rng.repair);
        }
        const HitDistributionTable* base = nullptr;
        std::size_t nearest = std::numeric_limits<std::size_t>::max();
        for (const Individual* p : {&pa, &pb}) {
          if (!p->table) continue;
          const std::size_t d = hamming_distance(p->genome, child);
          if (d < nearest) {
            nearest = d;
            base = &*p->table;
          }
        }
        if (nearest > params.k / 2) base = nullptr;
        auto res = objective.bi_objective(child, base);
        if (res.evaluated()) {
          ++evals;
          out.trace.observe(evals, res.objectives.f1, child.count());
        }
        offspring.push_back(make_individual(std::move(child), std::move(res), evals));
      }
    }
    std::vector<Individual> pool = std::move(pop.members);
    for (auto& o : offspring) pool.push_back(std::move(o));
    pop = detail::survivors_of(std::move(pool), pop_size);
  }
  out.trace.iterations = iter;
  out.trace.close(evals, best_feasible(pop.members));
  return out;
}

}  // namespace covax
