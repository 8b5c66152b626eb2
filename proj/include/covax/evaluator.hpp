#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "covax/genome.hpp"
#include "covax/instance.hpp"
#include "covax/parallel.hpp"

namespace covax {

namespace detail {

// Leaves value-initialised elements uninitialised; every table entry is
// written by the add/remove kernels before it is read.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  DefaultInitAllocator() = default;
  template <class U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    if constexpr (sizeof...(Args) == 0) {
      ::new (static_cast<void*>(p)) U;
    } else {
      ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
    }
  }
};

}  // namespace detail

/// Per-genotype Poisson-binomial distribution of the hit count of a selected
/// peptide set S: row m holds P(exactly j peptides of S bind genotype m).
///
/// Logically every row has length |S| + 1. Physically row m stores only
/// indices 0..c_m, where c_m counts the peptides of S with p(v,m) > 0; the
/// entries above c_m are exactly zero. Rows are never truncated at the
/// redundancy threshold, which keeps removal exact.
class HitDistributionTable {
 public:
  HitDistributionTable() = default;

  static HitDistributionTable empty(std::size_t genotypes) {
    HitDistributionTable t;
    t.offsets_.resize(genotypes + 1);
    for (std::size_t m = 0; m <= genotypes; ++m) t.offsets_[m] = m;
    t.data_.assign(genotypes, 1.0);
    return t;
  }

  std::size_t genotype_count() const noexcept {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  std::size_t support_size() const noexcept { return support_.size(); }
  const std::vector<PeptideIndex>& support() const noexcept { return support_; }

  bool contains(PeptideIndex v) const {
    return std::binary_search(support_.begin(), support_.end(), v);
  }

  std::span<const double> stored_row(std::size_t m) const {
    return {data_.data() + offsets_[m], offsets_[m + 1] - offsets_[m]};
  }

  /// Dense row of length support_size() + 1; drift below zero is clamped.
  std::vector<double> row(std::size_t m) const {
    std::vector<double> out(support_.size() + 1, 0.0);
    const auto r = stored_row(m);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = std::max(0.0, r[j]);
    return out;
  }

  double row_sum(std::size_t m) const {
    double s = 0.0;
    for (double x : stored_row(m)) s += x;
    return s;
  }

  Genome genome(std::size_t n) const { return Genome::from_indices(n, support_); }

  std::size_t stored_entries() const noexcept { return data_.size(); }

 private:
  friend HitDistributionTable build_table(const Instance&, const std::vector<PeptideIndex>&,
                                          unsigned);
  friend HitDistributionTable apply_add(const HitDistributionTable&, const Instance&,
                                        PeptideIndex);
  friend HitDistributionTable apply_remove(const HitDistributionTable&, const Instance&,
                                           PeptideIndex, std::size_t*);

  std::vector<PeptideIndex> support_;
  std::vector<std::size_t> offsets_;
  std::vector<double, detail::DefaultInitAllocator<double>> data_;
};

namespace detail {

/// out[0..len] = in[0..len-1] convolved with Bernoulli(p).
inline void convolve_add(const double* in, std::size_t len, double p, double* out) {
  const double q = 1.0 - p;
  out[len] = p * in[len - 1];
  for (std::size_t j = len - 1; j > 0; --j) out[j] = q * in[j] + p * in[j - 1];
  out[0] = q * in[0];
}

/// In-place variant; row has room for len + 1 entries.
inline void convolve_add_inplace(double* row, std::size_t len, double p) {
  convolve_add(row, len, p, row);
}

struct RowCheck {
  double sum = 0.0;
  double min = 0.0;
};

/// y[t] = r*x[t] - a*y[t-1] with y[-1] = 0, element t at offset Step*t.
/// Four steps are taken per dependent multiply-add, so long rows do not
/// serialise on the recurrence latency. Returns the sum and minimum of y.
template <int Step>
inline RowCheck solve_first_order(const double* x, double* y, std::size_t count, double r,
                                  double a) {
  const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2;
  auto at = [](std::size_t t) { return Step * static_cast<std::ptrdiff_t>(t); };
  RowCheck c;
  double prev = 0.0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const double x0 = r * x[at(t)], x1 = r * x[at(t + 1)];
    const double x2 = r * x[at(t + 2)], x3 = r * x[at(t + 3)];
    const double y1_part = x1 - a * x0;
    const double y2_part = x2 - a * x1 + a2 * x0;
    const double y3_part = x3 - a * x2 + a2 * x1 - a3 * x0;
    const double y0 = x0 - a * prev;
    const double y1 = y1_part + a2 * prev;
    const double y2 = y2_part - a3 * prev;
    prev = y3_part + a4 * prev;
    y[at(t)] = y0;
    y[at(t + 1)] = y1;
    y[at(t + 2)] = y2;
    y[at(t + 3)] = prev;
    c.sum += (y0 + y1) + (y2 + prev);
    c.min = std::min(c.min, std::min(std::min(y0, y1), std::min(y2, prev)));
  }
  for (; t < count; ++t) {
    prev = r * x[at(t)] - a * prev;
    y[at(t)] = prev;
    c.sum += prev;
    c.min = std::min(c.min, prev);
  }
  return c;
}

/// Removes one Bernoulli(p) factor: in has len entries, out gets len - 1.
/// Forward substitution for p <= 1/2, backward from the top entry otherwise;
/// either way the recurrence divides by the larger of p and 1 - p.
inline RowCheck deconvolve(const double* in, std::size_t len, double p, double* out) {
  const double q = 1.0 - p;
  const std::size_t out_len = len - 1;
  if (p <= 0.5) return solve_first_order<1>(in, out, out_len, 1.0 / q, p / q);
  return solve_first_order<-1>(in + len - 1, out + out_len - 1, out_len, 1.0 / p, q / p);
}

inline void rebuild_row(const Instance& inst, const std::vector<PeptideIndex>& support,
                        GenotypeIndex m, double* row, std::size_t expected_len) {
  std::fill(row, row + expected_len, 0.0);
  row[0] = 1.0;
  std::size_t len = 1;
  for (auto v : support) {
    const double p = inst.probability(v, m);
    if (p > 0.0) convolve_add_inplace(row, len++, p);
  }
  if (len != expected_len) throw std::logic_error("rebuild_row: support/row length mismatch");
}

inline constexpr double kRowSumTolerance = 1e-9;

// NaN fails both comparisons.
inline bool row_is_sane(const RowCheck& c) {
  return c.min >= -1e-9 && std::abs(c.sum - 1.0) <= kRowSumTolerance;
}

inline constexpr std::size_t kParallelGenotypeThreshold = 4096;

}  // namespace detail

/// E[min(Y, N)] for a row of P(Y = j).
inline double truncated_expectation(std::span<const double> row, std::size_t N) {
  double below = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double x = std::max(0.0, row[j]);
    if (j < N) {
      below += static_cast<double>(j) * x;
    } else {
      tail += x;
    }
  }
  return below + static_cast<double>(N) * tail;
}

/// sum_m w(m) * E[min(Y_m, N)], reduced in ascending genotype order so the
/// result does not depend on the worker count.
inline double coverage_value(const Instance& inst, const HitDistributionTable& table,
                             std::size_t N, unsigned threads = 1) {
  const std::size_t M = table.genotype_count();
  if (threads <= 1 || M < detail::kParallelGenotypeThreshold) {
    double total = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      total += inst.weights[m] * truncated_expectation(table.stored_row(m), N);
    }
    return total;
  }
  std::vector<double> contrib(M);
  parallel_chunks(M, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      contrib[m] = inst.weights[m] * truncated_expectation(table.stored_row(m), N);
    }
  });
  double total = 0.0;
  for (double c : contrib) total += c;
  return total;
}

/// Builds the table for `peptides` (sorted ascending) by iterated
/// convolution, adding peptides in ascending index order.
inline HitDistributionTable build_table(const Instance& inst,
                                        const std::vector<PeptideIndex>& peptides,
                                        unsigned threads = 1) {
  const std::size_t M = inst.genotype_count();
  HitDistributionTable t;
  t.support_ = peptides;
  std::vector<std::size_t> len(M, 1);
  for (auto v : peptides) {
    for (const auto& b : inst.bindings_of(v)) ++len[b.genotype];
  }
  t.offsets_.resize(M + 1);
  t.offsets_[0] = 0;
  for (std::size_t m = 0; m < M; ++m) t.offsets_[m + 1] = t.offsets_[m] + len[m];
  t.data_.assign(t.offsets_[M], 0.0);

  auto fill = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> cur(end - begin, 1);
    for (std::size_t m = begin; m < end; ++m) t.data_[t.offsets_[m]] = 1.0;
    for (auto v : peptides) {
      const auto& col = inst.bindings_of(v);
      auto it = std::lower_bound(col.begin(), col.end(), begin,
                                 [](const Binding& b, std::size_t g) { return b.genotype < g; });
      for (; it != col.end() && it->genotype < end; ++it) {
        auto& l = cur[it->genotype - begin];
        detail::convolve_add_inplace(t.data_.data() + t.offsets_[it->genotype], l, it->probability);
        ++l;
      }
    }
  };
  if (threads <= 1 || M < detail::kParallelGenotypeThreshold) {
    fill(0, M);
  } else {
    parallel_chunks(M, threads, fill);
  }
  return t;
}

/// D^{S+v} from D^S: j = 0 scaled by (1-p), interior entries mixed,
/// new top entry p * D_{|S|}. Rows with p = 0 are copied unchanged.
inline HitDistributionTable apply_add(const HitDistributionTable& table, const Instance& inst,
                                      PeptideIndex v) {
  if (table.contains(v)) throw std::invalid_argument("apply_add: peptide already in support");
  const auto& col = inst.bindings_of(v);
  const std::size_t M = table.genotype_count();

  HitDistributionTable out;
  out.support_ = table.support_;
  out.support_.insert(std::lower_bound(out.support_.begin(), out.support_.end(), v), v);
  out.offsets_.resize(M + 1);
  out.data_.resize(table.data_.size() + col.size());

  const auto& in_off = table.offsets_;
  std::size_t shift = 0;
  std::size_t next_row = 0;
  auto copy_rows = [&](std::size_t end_row) {
    for (std::size_t m = next_row; m < end_row; ++m) out.offsets_[m] = in_off[m] + shift;
    const std::size_t n = in_off[end_row] - in_off[next_row];
    if (n) {
      std::memcpy(out.data_.data() + in_off[next_row] + shift,
                  table.data_.data() + in_off[next_row], n * sizeof(double));
    }
    next_row = end_row;
  };
  for (const auto& b : col) {
    copy_rows(b.genotype);
    const std::size_t g = b.genotype;
    const std::size_t len = in_off[g + 1] - in_off[g];
    out.offsets_[g] = in_off[g] + shift;
    detail::convolve_add(table.data_.data() + in_off[g], len, b.probability,
                         out.data_.data() + out.offsets_[g]);
    ++shift;
    next_row = g + 1;
  }
  copy_rows(M);
  out.offsets_[M] = in_off[M] + shift;
  return out;
}

/// D^{S-v} from D^S by deconvolution. A row that fails the sanity check
/// (sum off by more than 1e-9 or a clearly negative entry) is rebuilt from
/// scratch; the number of rebuilt rows is added to *rebuilt_rows if given.
inline HitDistributionTable apply_remove(const HitDistributionTable& table, const Instance& inst,
                                         PeptideIndex v, std::size_t* rebuilt_rows = nullptr) {
  if (!table.contains(v)) throw std::invalid_argument("apply_remove: peptide not in support");
  const auto& col = inst.bindings_of(v);
  const std::size_t M = table.genotype_count();

  HitDistributionTable out;
  out.support_ = table.support_;
  out.support_.erase(std::lower_bound(out.support_.begin(), out.support_.end(), v));
  out.offsets_.resize(M + 1);
  out.data_.resize(table.data_.size() - col.size());

  const auto& in_off = table.offsets_;
  std::size_t shift = 0;
  std::size_t next_row = 0;
  auto copy_rows = [&](std::size_t end_row) {
    for (std::size_t m = next_row; m < end_row; ++m) out.offsets_[m] = in_off[m] - shift;
    const std::size_t n = in_off[end_row] - in_off[next_row];
    if (n) {
      std::memcpy(out.data_.data() + in_off[next_row] - shift,
                  table.data_.data() + in_off[next_row], n * sizeof(double));
    }
    next_row = end_row;
  };
  for (const auto& b : col) {
    copy_rows(b.genotype);
    const std::size_t g = b.genotype;
    const std::size_t len = in_off[g + 1] - in_off[g];
    out.offsets_[g] = in_off[g] - shift;
    double* dst = out.data_.data() + out.offsets_[g];
    const auto check = detail::deconvolve(table.data_.data() + in_off[g], len, b.probability, dst);
    if (!detail::row_is_sane(check)) {
      detail::rebuild_row(inst, out.support_, b.genotype, dst, len - 1);
      if (rebuilt_rows) ++*rebuilt_rows;
    }
    ++shift;
    next_row = g + 1;
  }
  copy_rows(M);
  out.offsets_[M] = in_off[M] - shift;
  return out;
}

struct Evaluation {
  double value = 0.0;
  HitDistributionTable table;
};

inline Evaluation eval_from_scratch(const Instance& inst, const Genome& g, std::size_t N,
                                    unsigned threads = 1) {
  Evaluation e;
  e.table = build_table(inst, g.indices(), threads);
  e.value = coverage_value(inst, e.table, N, threads);
  return e;
}

/// Derives the child's table from the parent's: adds child \ parent, then
/// removes parent \ child.
inline Evaluation eval_incremental(const Instance& inst, const HitDistributionTable& parent,
                                   const Genome& child, std::size_t N, unsigned threads = 1,
                                   std::size_t* rebuilt_rows = nullptr) {
  const auto target = child.indices();
  const auto& have = parent.support();
  std::vector<PeptideIndex> adds, removes;
  std::set_difference(target.begin(), target.end(), have.begin(), have.end(),
                      std::back_inserter(adds));
  std::set_difference(have.begin(), have.end(), target.begin(), target.end(),
                      std::back_inserter(removes));
  Evaluation e;
  const HitDistributionTable* current = &parent;
  for (auto v : adds) {
    e.table = apply_add(*current, inst, v);
    current = &e.table;
  }
  for (auto v : removes) {
    e.table = apply_remove(*current, inst, v, rebuilt_rows);
    current = &e.table;
  }
  if (current == &parent) e.table = parent;
  e.value = coverage_value(inst, e.table, N, threads);
  return e;
}

inline Evaluation eval_incremental(const Instance& inst, const HitDistributionTable& parent_table,
                                   const Genome& parent_genome, const Genome& child,
                                   std::size_t N) {
  if (parent_table.support() != parent_genome.indices()) {
    throw std::invalid_argument("eval_incremental: table does not match parent genome");
  }
  return eval_incremental(inst, parent_table, child, N);
}

/// |g| <= k and g is an independent set of the graph.
inline bool is_feasible(const Genome& g, std::size_t k, const Graph& graph) {
  if (g.count() > k) return false;
  for (auto v : g.indices()) {
    for (auto u : graph.neighbors(v)) {
      if (u > v && g.test(u)) return false;
    }
  }
  return true;
}

/// Number of edges with both endpoints selected.
inline std::size_t count_violations(const Genome& g, const Graph& graph) {
  std::size_t c = 0;
  for (auto v : g.indices()) {
    for (auto u : graph.neighbors(v)) {
      if (u > v && g.test(u)) ++c;
    }
  }
  return c;
}

/// f(S + v) - f(S), using a transient add over the rows v touches only.
/// The input table is not modified.
inline double marginal_gain(const Instance& inst, const HitDistributionTable& table,
                            PeptideIndex v, std::size_t N) {
  if (table.contains(v)) throw std::invalid_argument("marginal_gain: peptide already in support");
  double gain = 0.0;
  std::vector<double> scratch;
  for (const auto& b : inst.bindings_of(v)) {
    const auto r = table.stored_row(b.genotype);
    scratch.resize(r.size() + 1);
    detail::convolve_add(r.data(), r.size(), b.probability, scratch.data());
    gain += inst.weights[b.genotype] *
            (truncated_expectation(scratch, N) - truncated_expectation(r, N));
  }
  return std::max(0.0, gain);
}

/// (f1, f2) of the bi-objective reformulation: f1 = f(s) if feasible else -1,
/// f2 = -|s|.
struct ObjectivePair {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;
};

inline constexpr double kInfeasibleF1 = -1.0;

struct BiObjectiveResult {
  ObjectivePair objectives;
  std::optional<HitDistributionTable> table;  // present iff feasible

  bool evaluated() const noexcept { return table.has_value(); }
};

/// Instance plus (k, N) and the evaluation worker count, shared read-only by
/// the search algorithms.
class CoverageObjective {
 public:
  CoverageObjective(const Instance& inst, std::size_t k, std::size_t N, unsigned threads = 1)
      : inst_(&inst), k_(k), N_(N), threads_(std::max(1u, threads)) {}

  const Instance& instance() const noexcept { return *inst_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t N() const noexcept { return N_; }
  std::size_t n() const noexcept { return inst_->peptide_count(); }
  unsigned threads() const noexcept { return threads_; }

  bool feasible(const Genome& g) const { return is_feasible(g, k_, inst_->graph); }

  Evaluation evaluate(const Genome& g) const { return eval_from_scratch(*inst_, g, N_, threads_); }

  Evaluation evaluate_from(const HitDistributionTable& parent, const Genome& child) const {
    return eval_incremental(*inst_, parent, child, N_, threads_, &rebuilt_rows_);
  }

  /// Infeasible genomes get the -1 sentinel without touching the coverage
  /// kernel. With `parent` given the table is derived incrementally.
  BiObjectiveResult bi_objective(const Genome& g,
                                 const HitDistributionTable* parent = nullptr) const {
    BiObjectiveResult r;
    r.objectives.f2 = -static_cast<double>(g.count());
    if (!feasible(g)) {
      r.objectives.f1 = kInfeasibleF1;
      return r;
    }
    Evaluation e = parent ? evaluate_from(*parent, g) : evaluate(g);
    r.objectives.f1 = e.value;
    r.table = std::move(e.table);
    return r;
  }

  std::size_t rebuilt_rows() const noexcept { return rebuilt_rows_; }

 private:
  const Instance* inst_;
  std::size_t k_;
  std::size_t N_;
  unsigned threads_;
  mutable std::size_t rebuilt_rows_ = 0;
};

inline BiObjectiveResult bi_objective(const Instance& inst, const Genome& g, std::size_t k,
                                      std::size_t N,
                                      const HitDistributionTable* table_in = nullptr) {
  return CoverageObjective(inst, k, N).bi_objective(g, table_in);
}

}  // namespace covax
