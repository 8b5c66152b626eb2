#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "covax/evaluator.hpp"
#include "covax/instance.hpp"
#include "covax/rng.hpp"

namespace covax {

enum class WeightLaw { uniform, dirichlet };

struct GenParams {
  std::size_t n = 50;
  std::size_t m_count = 100;
  double edge_density = 0.05;
  double binding_sparsity = 0.2;  // expected fraction of nonzero (v, m) pairs
  double prob_lo = 0.05;
  double prob_hi = 0.95;
  WeightLaw weight_law = WeightLaw::dirichlet;
  std::size_t sequence_length = 9;  // 0 disables the sequence column
};

namespace detail {

inline std::string padded_id(const char* prefix, std::size_t i, std::size_t count) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(count == 0 ? 0 : count - 1).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace detail

/// Random desk-scale instance. Probabilities and weights are quantized to the
/// on-disk decimal form, so save/load reproduces the instance exactly.
inline Instance generate_synthetic(const GenParams& params, std::uint64_t seed) {
  if (params.n < 2) throw std::invalid_argument("generate_synthetic: n must be at least 2");
  if (params.m_count == 0) throw std::invalid_argument("generate_synthetic: m_count must be positive");
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(params.edge_density) || !in_unit(params.binding_sparsity)) {
    throw std::invalid_argument("generate_synthetic: densities must lie in [0,1]");
  }
  if (!(params.prob_lo >= 0.0 && params.prob_lo <= params.prob_hi && params.prob_hi < 1.0)) {
    throw std::invalid_argument("generate_synthetic: need 0 <= prob_lo <= prob_hi < 1");
  }

  Rng rng = Rng::stream(seed, "instance");
  Instance inst;
  for (std::size_t v = 0; v < params.n; ++v) {
    inst.peptide_ids.push_back(detail::padded_id("pep", v, params.n));
  }
  if (params.sequence_length > 0) {
    static constexpr char kAminoAcids[] = "ACDEFGHIKLMNPQRSTVWY";
    for (std::size_t v = 0; v < params.n; ++v) {
      std::string s(params.sequence_length, 'A');
      for (auto& c : s) c = kAminoAcids[rng.index(20)];
      inst.peptide_sequences.push_back(std::move(s));
    }
  }
  for (std::size_t g = 0; g < params.m_count; ++g) {
    inst.genotype_ids.push_back(detail::padded_id("mhc", g, params.m_count));
  }

  std::vector<double> raw(params.m_count);
  double sum = 0.0;
  for (auto& w : raw) {
    // Dirichlet(1,...,1) via normalized unit exponentials
    w = params.weight_law == WeightLaw::uniform ? 1.0 - rng.uniform()
                                                : -std::log(1.0 - rng.uniform());
    sum += w;
  }
  for (auto& w : raw) {
    double q = quantize_decimal(params.weight_law == WeightLaw::dirichlet ? w / sum : w);
    inst.weights.push_back(q > 0.0 ? q : 1e-12);
  }

  inst.bindings.assign(params.n, {});
  for (std::size_t v = 0; v < params.n; ++v) {
    for (std::size_t g = 0; g < params.m_count; ++g) {
      if (!rng.bernoulli(params.binding_sparsity)) continue;
      const double p = quantize_decimal(params.prob_lo +
                                        (params.prob_hi - params.prob_lo) * rng.uniform());
      if (p > 0.0) {
        inst.bindings[v].push_back({static_cast<GenotypeIndex>(g), std::min(p, kMaxProbability)});
      }
    }
  }

  inst.graph = Graph(params.n);
  for (PeptideIndex a = 0; a < params.n; ++a) {
    for (PeptideIndex b = a + 1; b < params.n; ++b) {
      if (params.edge_density >= 1.0 || rng.bernoulli(params.edge_density)) {
        inst.graph.add_edge(a, b);
      }
    }
  }
  return inst;
}

/// f(X) for the adversarial instance's selected-peptide checks.
inline double exact_value(const Instance& inst, const std::vector<PeptideIndex>& peptides,
                          std::size_t N) {
  return eval_from_scratch(inst, Genome::from_indices(inst.peptide_count(), peptides), N).value;
}

/// Trap instance for the greedy: every peptide owns one genotype of weight 1
/// (disjoint supports, so f is additive whenever N >= |S|), with p(v1) = 0.9,
/// p(v2) = p(v3) = 0.6 and 0.2 for the rest. Edges are (v1,v2), (v1,v3), plus
/// optionally a perfect pairing (v4,v5), (v6,v7), ... of degree at most 1.
/// Greedy takes v1 first and is locked out of {v2, v3}.
inline Instance generate_adversarial(std::size_t n, bool pair_remaining = false) {
  if (n < 4) throw std::invalid_argument("generate_adversarial: n must be at least 4");
  Instance inst;
  for (std::size_t i = 1; i <= n; ++i) {
    inst.peptide_ids.push_back("v" + std::to_string(i));
    inst.genotype_ids.push_back("m" + std::to_string(i));
    inst.weights.push_back(1.0);
  }
  inst.bindings.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    const double p = v == 0 ? 0.9 : (v <= 2 ? 0.6 : 0.2);
    inst.bindings[v].push_back({static_cast<GenotypeIndex>(v), p});
  }
  inst.graph = Graph(n);
  inst.graph.add_edge(0, 1);
  inst.graph.add_edge(0, 2);
  if (pair_remaining) {
    for (PeptideIndex v = 3; v + 1 < n; v += 2) inst.graph.add_edge(v, v + 1);
  }

  // f({v2,v3}) > f({v1,vx}) for every vx not adjacent to v1
  const std::size_t N = 2;
  const double pair23 = exact_value(inst, {1, 2}, N);
  for (PeptideIndex x = 3; x < n; ++x) {
    if (!(exact_value(inst, {0, x}, N) < pair23)) {
      throw std::logic_error("generate_adversarial: trap property violated");
    }
  }
  return inst;
}

}  // namespace covax
