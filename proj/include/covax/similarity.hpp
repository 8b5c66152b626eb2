#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covax/instance.hpp"

namespace covax {

/// Unit-cost Levenshtein distance (insertions, deletions, substitutions).
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Edge (i, j) iff i != j and levenshtein(seq_i, seq_j) <= threshold.
inline Graph build_similarity_graph(const std::vector<std::string>& sequences,
                                    std::size_t threshold) {
  if (sequences.empty()) {
    throw std::invalid_argument("build_similarity_graph: empty sequence list");
  }
  Graph g(sequences.size());
  for (PeptideIndex i = 0; i < sequences.size(); ++i) {
    for (PeptideIndex j = i + 1; j < sequences.size(); ++j) {
      const auto& a = sequences[i];
      const auto& b = sequences[j];
      // length difference is a lower bound on the distance
      const std::size_t gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
      if (gap > threshold) continue;
      if (levenshtein(a, b) <= threshold) g.add_edge(i, j);
    }
  }
  return g;
}

}  // namespace covax
