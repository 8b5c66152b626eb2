#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covax/evaluator.hpp"
#include "covax/rng.hpp"

namespace covax {

inline constexpr std::size_t kOracleMaxPeptides = 24;
inline constexpr std::size_t kOracleMaxSubset = 15;

struct OracleReport {
  double optimum_value = 0.0;
  Genome optimum_genome;
  std::size_t candidates_examined = 0;
};

/// f(subset) straight from the definition: for each genotype, every one of
/// the 2^|subset| binding outcomes weighted by its probability, times
/// min(hits, N). Shares no code with the convolution path.
inline double enumerate_expectation(const Instance& inst, const std::vector<PeptideIndex>& subset,
                                    std::size_t N) {
  if (subset.size() > kOracleMaxSubset) {
    throw std::invalid_argument("enumerate_expectation: subset larger than 15");
  }
  const std::size_t s = subset.size();
  std::vector<double> p(s);
  double total = 0.0;
  for (GenotypeIndex m = 0; m < inst.genotype_count(); ++m) {
    for (std::size_t i = 0; i < s; ++i) p[i] = inst.probability(subset[i], m);
    double expect = 0.0;
    for (std::uint32_t outcome = 0; outcome < (1u << s); ++outcome) {
      double prob = 1.0;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < s; ++i) {
        if (outcome & (1u << i)) {
          prob *= p[i];
          ++hits;
        } else {
          prob *= 1.0 - p[i];
        }
      }
      expect += prob * static_cast<double>(std::min(hits, N));
    }
    total += inst.weights[m] * expect;
  }
  return total;
}

/// Exhaustive optimum over independent sets of size <= k, enumerated by
/// extending only with higher-indexed vertices not adjacent to the current
/// set. Ties go to the smaller set, then the lexicographically smaller genome.
inline OracleReport brute_force_opt(const Instance& inst, std::size_t k, std::size_t N) {
  const std::size_t n = inst.peptide_count();
  if (n > kOracleMaxPeptides) throw std::invalid_argument("brute_force_opt: n larger than 24");

  OracleReport best;
  best.optimum_genome = Genome(n);
  best.optimum_value = eval_from_scratch(inst, best.optimum_genome, N).value;
  best.candidates_examined = 1;

  Genome current(n);
  std::vector<int> blocked(n, 0);
  auto consider = [&] {
    const double f = eval_from_scratch(inst, current, N).value;
    ++best.candidates_examined;
    const bool better =
        f > best.optimum_value ||
        (f == best.optimum_value &&
         (current.count() < best.optimum_genome.count() ||
          (current.count() == best.optimum_genome.count() &&
           lexicographically_less(current, best.optimum_genome))));
    if (better) {
      best.optimum_value = f;
      best.optimum_genome = current;
    }
  };
  auto extend = [&](auto&& self, PeptideIndex from) -> void {
    if (current.count() == k) return;
    for (PeptideIndex v = from; v < n; ++v) {
      if (blocked[v]) continue;
      current.set(v);
      for (auto u : inst.graph.neighbors(v)) ++blocked[u];
      consider();
      self(self, v + 1);
      for (auto u : inst.graph.neighbors(v)) --blocked[u];
      current.reset(v);
    }
  };
  extend(extend, 0);
  return best;
}

struct AuditReport {
  std::size_t monotonicity_checks = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t submodularity_checks = 0;
  std::size_t submodularity_violations = 0;
  double min_monotone_step = std::numeric_limits<double>::infinity();
  double min_gain_gap = std::numeric_limits<double>::infinity();

  bool clean() const noexcept {
    return monotonicity_violations == 0 && submodularity_violations == 0;
  }
};

/// Random spot checks of monotonicity (f(S_{i+1}) >= f(S_i) along random
/// chains) and diminishing returns (gain(X, v) >= gain(Y, v) for X in Y,
/// v outside Y). `samples` counts checks of each kind.
inline AuditReport audit_properties(const Instance& inst, std::size_t N, std::size_t samples,
                                    Rng& rng) {
  const std::size_t n = inst.peptide_count();
  AuditReport rep;
  if (n == 0) return rep;
  auto f = [&](const Genome& g) { return eval_from_scratch(inst, g, N).value; };

  std::vector<PeptideIndex> order(n);
  while (rep.monotonicity_checks < samples) {
    for (PeptideIndex i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    const std::size_t length = 1 + rng.index(std::min<std::size_t>(n, 12));
    Genome g(n);
    double prev = f(g);
    for (std::size_t i = 0; i < length && rep.monotonicity_checks < samples; ++i) {
      g.set(order[i]);
      const double cur = f(g);
      const double step = cur - prev;
      rep.min_monotone_step = std::min(rep.min_monotone_step, step);
      if (step < -1e-12) ++rep.monotonicity_violations;
      ++rep.monotonicity_checks;
      prev = cur;
    }
  }

  if (n < 2) return rep;
  // |Y| is about min(n/2, 24), |X| about half of that
  const double in_y = std::min(0.5, 24.0 / static_cast<double>(n));
  while (rep.submodularity_checks < samples) {
    const PeptideIndex v = static_cast<PeptideIndex>(rng.index(n));
    Genome x(n), y(n);
    for (PeptideIndex u = 0; u < n; ++u) {
      if (u == v) continue;
      const double r = rng.uniform();
      if (r < in_y / 2) {
        x.set(u);
        y.set(u);
      } else if (r < in_y) {
        y.set(u);
      }
    }
    Genome xv = x, yv = y;
    xv.set(v);
    yv.set(v);
    const double gap = (f(xv) - f(x)) - (f(yv) - f(y));
    rep.min_gain_gap = std::min(rep.min_gain_gap, gap);
    if (gap < -1e-9) ++rep.submodularity_violations;
    ++rep.submodularity_checks;
  }
  return rep;
}

}  // namespace covax
