#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covax/genome.hpp"
#include "covax/io.hpp"

namespace covax {

using GenotypeIndex = std::uint32_t;

/// Largest probability admitted after ingestion. Removal divides by (1 - p).
inline constexpr double kMaxProbability = 0.999999999;

struct Binding {
  GenotypeIndex genotype = 0;
  double probability = 0.0;

  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Undirected simple graph over peptide indices, adjacency lists kept sorted.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t vertices) : adjacency_(vertices) {}

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }

  /// Returns false for duplicates. Self-loops are rejected.
  bool add_edge(PeptideIndex a, PeptideIndex b) {
    if (a == b) throw std::invalid_argument("graph: self-loop");
    if (a >= adjacency_.size() || b >= adjacency_.size()) {
      throw std::out_of_range("graph: vertex out of range");
    }
    auto& la = adjacency_[a];
    auto it = std::lower_bound(la.begin(), la.end(), b);
    if (it != la.end() && *it == b) return false;
    la.insert(it, b);
    auto& lb = adjacency_[b];
    lb.insert(std::lower_bound(lb.begin(), lb.end(), a), a);
    ++edges_;
    return true;
  }

  bool has_edge(PeptideIndex a, PeptideIndex b) const {
    const auto& la = adjacency_[a];
    return std::binary_search(la.begin(), la.end(), b);
  }

  const std::vector<PeptideIndex>& neighbors(PeptideIndex v) const {
    return adjacency_[v];
  }

  std::size_t degree(PeptideIndex v) const { return adjacency_[v].size(); }

  /// Each edge once as (low, high), sorted.
  std::vector<std::pair<PeptideIndex, PeptideIndex>> edges() const {
    std::vector<std::pair<PeptideIndex, PeptideIndex>> out;
    out.reserve(edges_);
    for (PeptideIndex a = 0; a < adjacency_.size(); ++a) {
      for (auto b : adjacency_[a]) {
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<PeptideIndex>> adjacency_;
  std::size_t edges_ = 0;
};

/// Problem data: peptides V, genotypes M with weights w(m), sparse binding
/// probabilities p(v,m) and the similarity graph. Absent (v,m) pairs have
/// probability exactly 0. Treated as immutable once built.
struct Instance {
  std::vector<std::string> peptide_ids;
  std::vector<std::string> peptide_sequences;  // empty when not provided
  std::vector<std::string> genotype_ids;
  std::vector<double> weights;
  /// Per peptide, nonzero bindings sorted by genotype index.
  std::vector<std::vector<Binding>> bindings;
  Graph graph;

  std::size_t peptide_count() const noexcept { return peptide_ids.size(); }
  std::size_t genotype_count() const noexcept { return genotype_ids.size(); }
  bool has_sequences() const noexcept { return !peptide_sequences.empty(); }

  const std::vector<Binding>& bindings_of(PeptideIndex v) const {
    return bindings[v];
  }

  double probability(PeptideIndex v, GenotypeIndex m) const {
    const auto& col = bindings[v];
    auto it = std::lower_bound(
        col.begin(), col.end(), m,
        [](const Binding& b, GenotypeIndex g) { return b.genotype < g; });
    return (it != col.end() && it->genotype == m) ? it->probability : 0.0;
  }

  double total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
  }

  std::size_t binding_count() const {
    std::size_t c = 0;
    for (const auto& col : bindings) c += col.size();
    return c;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline std::size_t max_degree(const Instance& inst) {
  std::size_t d = 0;
  for (PeptideIndex v = 0; v < inst.peptide_count(); ++v) {
    d = std::max(d, inst.graph.degree(v));
  }
  return d;
}

/// Carries every problem found while loading, each prefixed "file:line: ".
class InstanceError : public std::runtime_error {
 public:
  explicit InstanceError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += '\n';
      s += i;
    }
    return s;
  }

  std::vector<std::string> issues_;
};

/// Structural invariants of an in-memory instance; empty result means clean.
inline std::vector<std::string> check_invariants(const Instance& inst) {
  std::vector<std::string> issues;
  const std::size_t n = inst.peptide_count();
  const std::size_t m = inst.genotype_count();
  if (inst.bindings.size() != n) issues.push_back("bindings: size mismatch");
  if (inst.weights.size() != m) issues.push_back("weights: size mismatch");
  if (inst.has_sequences() && inst.peptide_sequences.size() != n) {
    issues.push_back("sequences: size mismatch");
  }
  if (inst.graph.vertex_count() != n) issues.push_back("graph: size mismatch");
  if (!issues.empty()) return issues;

  auto unique = [&](const std::vector<std::string>& ids, const char* what) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        issues.push_back(std::string(what) + ": duplicate id '" + id + "'");
      }
    }
  };
  unique(inst.peptide_ids, "peptides");
  unique(inst.genotype_ids, "genotypes");

  double sum = 0.0;
  for (std::size_t g = 0; g < m; ++g) {
    const double w = inst.weights[g];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      issues.push_back("genotypes: negative or non-finite weight for '" +
                       inst.genotype_ids[g] + "'");
    }
    sum += w;
  }
  if (!(sum > 0.0)) issues.push_back("genotypes: weights must sum to a positive value");

  for (PeptideIndex v = 0; v < n; ++v) {
    const auto& col = inst.bindings[v];
    for (std::size_t i = 0; i < col.size(); ++i) {
      const auto& b = col[i];
      if (b.genotype >= m) {
        issues.push_back("bindings: genotype index out of range for '" +
                         inst.peptide_ids[v] + "'");
      } else if (!(b.probability >= 0.0 && b.probability < 1.0)) {
        issues.push_back("bindings: probability out of range [0,1) for (" +
                         inst.peptide_ids[v] + ", " + inst.genotype_ids[b.genotype] + ")");
      }
      if (i > 0 && col[i - 1].genotype >= b.genotype) {
        issues.push_back("bindings: unsorted or duplicate entries for '" +
                         inst.peptide_ids[v] + "'");
      }
    }
    for (auto u : inst.graph.neighbors(v)) {
      if (u == v) {
        issues.push_back("edges: self-loop on '" + inst.peptide_ids[v] + "'");
      } else if (!inst.graph.has_edge(u, v)) {
        issues.push_back("edges: asymmetric adjacency between '" +
                         inst.peptide_ids[v] + "' and '" + inst.peptide_ids[u] + "'");
      }
    }
  }
  return issues;
}

namespace detail {

inline std::string where(const char* file, std::size_t line) {
  return std::string(file) + ":" + std::to_string(line) + ": ";
}

}  // namespace detail

/// Reads the four-file TSV directory (peptides, genotypes, bindings, edges).
/// Every problem is collected and reported together in one InstanceError.
/// Probabilities in (kMaxProbability, 1) are clamped and noted in `warnings`.
inline Instance load_instance(const fs::path& dir,
                              std::vector<std::string>* warnings = nullptr) {
  std::vector<std::string> issues;
  auto read = [&](const char* name) -> std::vector<TsvRow> {
    const fs::path p = dir / name;
    if (!fs::exists(p)) {
      issues.push_back(std::string(name) + ": missing file");
      return {};
    }
    try {
      return read_tsv(p);
    } catch (const std::exception& e) {
      issues.push_back(e.what());
      return {};
    }
  };

  Instance inst;
  std::unordered_map<std::string, PeptideIndex> peptide_index;
  std::unordered_map<std::string, GenotypeIndex> genotype_index;

  const auto peptide_rows = read("peptides.tsv");
  std::optional<bool> with_sequence;
  for (const auto& row : peptide_rows) {
    const auto at = detail::where("peptides.tsv", row.line);
    if (row.fields.size() > 2 || row.fields[0].empty()) {
      issues.push_back(at + "malformed row");
      continue;
    }
    const bool has_seq = row.fields.size() == 2;
    if (!with_sequence) with_sequence = has_seq;
    if (*with_sequence != has_seq) {
      issues.push_back(at + "sequence column must be present on all rows or none");
      continue;
    }
    const auto& id = row.fields[0];
    if (!peptide_index.emplace(id, static_cast<PeptideIndex>(inst.peptide_ids.size())).second) {
      issues.push_back(at + "duplicate id '" + id + "'");
      continue;
    }
    inst.peptide_ids.push_back(id);
    if (has_seq) inst.peptide_sequences.push_back(row.fields[1]);
  }

  const auto genotype_rows = read("genotypes.tsv");
  for (const auto& row : genotype_rows) {
    const auto at = detail::where("genotypes.tsv", row.line);
    if (row.fields.size() != 2 || row.fields[0].empty()) {
      issues.push_back(at + "malformed row");
      continue;
    }
    const auto w = parse_decimal(row.fields[1]);
    if (!w) {
      issues.push_back(at + "malformed weight '" + row.fields[1] + "'");
      continue;
    }
    if (!(*w >= 0.0) || !std::isfinite(*w)) {
      issues.push_back(at + "weight must be non-negative");
      continue;
    }
    const auto& id = row.fields[0];
    if (!genotype_index.emplace(id, static_cast<GenotypeIndex>(inst.genotype_ids.size())).second) {
      issues.push_back(at + "duplicate id '" + id + "'");
      continue;
    }
    inst.genotype_ids.push_back(id);
    inst.weights.push_back(*w);
  }
  if (!genotype_rows.empty() && !(inst.total_weight() > 0.0)) {
    issues.push_back("genotypes.tsv: weights must sum to a positive value");
  }

  inst.bindings.assign(inst.peptide_ids.size(), {});
  std::set<std::pair<PeptideIndex, GenotypeIndex>> seen_pairs;
  for (const auto& row : read("bindings.tsv")) {
    const auto at = detail::where("bindings.tsv", row.line);
    if (row.fields.size() != 3) {
      issues.push_back(at + "malformed row");
      continue;
    }
    const auto pi = peptide_index.find(row.fields[0]);
    const auto gi = genotype_index.find(row.fields[1]);
    if (pi == peptide_index.end()) {
      issues.push_back(at + "unknown peptide id '" + row.fields[0] + "'");
      continue;
    }
    if (gi == genotype_index.end()) {
      issues.push_back(at + "unknown genotype id '" + row.fields[1] + "'");
      continue;
    }
    const auto p = parse_decimal(row.fields[2]);
    if (!p) {
      issues.push_back(at + "malformed probability '" + row.fields[2] + "'");
      continue;
    }
    if (!(*p >= 0.0 && *p < 1.0)) {
      issues.push_back(at + "probability out of range [0,1): " + row.fields[2]);
      continue;
    }
    if (!seen_pairs.emplace(pi->second, gi->second).second) {
      issues.push_back(at + "duplicate binding (" + row.fields[0] + ", " + row.fields[1] + ")");
      continue;
    }
    double prob = *p;
    if (prob > kMaxProbability) {
      if (warnings) {
        warnings->push_back(at + "probability " + row.fields[2] + " clamped to " +
                            format_decimal(kMaxProbability));
      }
      prob = kMaxProbability;
    }
    if (prob > 0.0) inst.bindings[pi->second].push_back({gi->second, prob});
  }
  for (auto& col : inst.bindings) {
    std::sort(col.begin(), col.end(),
              [](const Binding& a, const Binding& b) { return a.genotype < b.genotype; });
  }

  // Rows are undirected. Listing both orientations is tolerated, but a file
  // that lists some pairs in both orientations and others in only one is
  // inconsistent and reported as asymmetric.
  inst.graph = Graph(inst.peptide_ids.size());
  std::map<std::pair<PeptideIndex, PeptideIndex>, std::size_t> directed;
  for (const auto& row : read("edges.tsv")) {
    const auto at = detail::where("edges.tsv", row.line);
    if (row.fields.size() != 2) {
      issues.push_back(at + "malformed row");
      continue;
    }
    const auto a = peptide_index.find(row.fields[0]);
    const auto b = peptide_index.find(row.fields[1]);
    const bool ok = a != peptide_index.end() && b != peptide_index.end();
    if (a == peptide_index.end()) {
      issues.push_back(at + "unknown peptide id '" + row.fields[0] + "'");
    }
    if (b == peptide_index.end()) {
      issues.push_back(at + "unknown peptide id '" + row.fields[1] + "'");
    }
    if (!ok) continue;
    if (a->second == b->second) {
      issues.push_back(at + "self-loop on '" + row.fields[0] + "'");
      continue;
    }
    directed.emplace(std::make_pair(a->second, b->second), row.line);
    inst.graph.add_edge(a->second, b->second);
  }
  bool any_mirrored = false;
  for (const auto& [e, line] : directed) {
    if (directed.count({e.second, e.first})) {
      any_mirrored = true;
      break;
    }
  }
  if (any_mirrored) {
    for (const auto& [e, line] : directed) {
      if (!directed.count({e.second, e.first})) {
        issues.push_back(detail::where("edges.tsv", line) +
                         "asymmetric edge list: reverse of (" + inst.peptide_ids[e.first] +
                         ", " + inst.peptide_ids[e.second] + ") missing");
      }
    }
  }

  if (!issues.empty()) throw InstanceError(std::move(issues));
  return inst;
}

/// Writes the directory format; probabilities and weights use 12 significant
/// digits so instances built from quantized values round-trip exactly.
inline void save_instance(const Instance& inst, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": cannot create directory");

  std::string peptides = "# id";
  peptides += inst.has_sequences() ? "\tsequence\n" : "\n";
  for (std::size_t v = 0; v < inst.peptide_count(); ++v) {
    peptides += inst.peptide_ids[v];
    if (inst.has_sequences()) peptides += "\t" + inst.peptide_sequences[v];
    peptides += '\n';
  }

  std::string genotypes = "# id\tweight\n";
  for (std::size_t g = 0; g < inst.genotype_count(); ++g) {
    genotypes += inst.genotype_ids[g] + "\t" + format_decimal(inst.weights[g]) + "\n";
  }

  std::string bindings = "# peptide\tgenotype\tprobability\n";
  for (std::size_t v = 0; v < inst.peptide_count(); ++v) {
    for (const auto& b : inst.bindings[v]) {
      bindings += inst.peptide_ids[v] + "\t" + inst.genotype_ids[b.genotype] + "\t" +
                  format_decimal(b.probability) + "\n";
    }
  }

  // One row per edge as (smaller id, larger id), rows sorted by id.
  std::vector<std::pair<std::string, std::string>> id_pairs;
  for (const auto& [a, b] : inst.graph.edges()) {
    id_pairs.push_back(std::minmax(inst.peptide_ids[a], inst.peptide_ids[b]));
  }
  std::sort(id_pairs.begin(), id_pairs.end());
  std::string edges = "# peptide\tpeptide\n";
  for (const auto& [a, b] : id_pairs) edges += a + "\t" + b + "\n";

  write_file_atomic(dir / "peptides.tsv", peptides);
  write_file_atomic(dir / "genotypes.tsv", genotypes);
  write_file_atomic(dir / "bindings.tsv", bindings);
  write_file_atomic(dir / "edges.tsv", edges);
}

}  // namespace covax
