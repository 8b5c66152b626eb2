#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "covax/greedy.hpp"
#include "covax/io.hpp"
#include "covax/moea/gsemo.hpp"
#include "covax/moea/mu_plus_one.hpp"
#include "covax/moea/nsga2.hpp"

namespace covax {

enum class AlgorithmKind { greedy, gsemo, nsga2, mu1ea };

/// Parsed algorithm name, e.g. "greedy", "gsemo-wr", "gsemo-r", "gsemo",
/// "nsga2-wr:pop=36", "mu1ea-wr:mu=5".
struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::greedy;
  bool warm = false;
  bool repair = false;
  std::size_t pop_size = 0;  // nsga2; 0 = 2(k+1)
  std::size_t mu = 0;        // mu1ea; 0 = k+1
  std::string text;

  static AlgorithmSpec parse(const std::string& text) {
    AlgorithmSpec s;
    s.text = text;
    std::string head = text;
    std::string option;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      head = text.substr(0, colon);
      option = text.substr(colon + 1);
    }
    std::string flags;
    if (const auto dash = head.find('-'); dash != std::string::npos) {
      flags = head.substr(dash + 1);
      head = head.substr(0, dash);
    }
    if (head == "greedy" || head == "optivax-p" || head == "optivax") {
      if (head != "greedy") flags.clear();
      if (!flags.empty() || !option.empty()) throw std::invalid_argument("greedy takes no options");
      s.kind = AlgorithmKind::greedy;
      return s;
    }
    if (head == "gsemo") {
      s.kind = AlgorithmKind::gsemo;
    } else if (head == "nsga2") {
      s.kind = AlgorithmKind::nsga2;
    } else if (head == "mu1ea") {
      s.kind = AlgorithmKind::mu1ea;
    } else {
      throw std::invalid_argument("unknown algorithm '" + text + "'");
    }
    for (char c : flags) {
      if (c == 'w') {
        s.warm = true;
      } else if (c == 'r') {
        s.repair = true;
      } else {
        throw std::invalid_argument("unknown algorithm flag in '" + text + "'");
      }
    }
    if (!option.empty()) {
      const auto eq = option.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("malformed option in '" + text + "'");
      const std::string key = option.substr(0, eq);
      std::size_t value = 0;
      try {
        value = std::stoul(option.substr(eq + 1));
      } catch (...) {
        throw std::invalid_argument("malformed option value in '" + text + "'");
      }
      if (key == "pop" && s.kind == AlgorithmKind::nsga2) {
        s.pop_size = value;
      } else if (key == "mu" && s.kind == AlgorithmKind::mu1ea) {
        s.mu = value;
      } else {
        throw std::invalid_argument("unknown option '" + key + "' for '" + text + "'");
      }
    }
    return s;
  }
};

struct RunOutcome {
  Trace trace;
  Genome solution;
  double f = 0.0;
  bool uses_warm_start = false;
};

/// Runs one algorithm; the greedy is reported with a trace of its rounds.
inline RunOutcome run_algorithm(const Instance& inst, const AlgorithmSpec& spec,
                                const RunParams& params) {
  RunOutcome out;
  switch (spec.kind) {
    case AlgorithmKind::greedy: {
      const auto p = params.normalized(inst.peptide_count());
      const auto g = optivax_p(inst, p.k, p.N, p.threads);
      out.trace.seed = p.seed;
      out.trace.config = "greedy";
      out.trace.observe(0, 0.0, 0);
      Genome prefix(inst.peptide_count());
      for (const auto& r : g.rounds) {
        prefix.set(r.chosen);
        out.trace.observe(r.evals_after, eval_from_scratch(inst, prefix, p.N).value, prefix.count());
      }
      Individual best{g.genome, {g.value, -static_cast<double>(g.genome.count())}, {}, 0};
      out.trace.close(g.evals_used, best);
      out.trace.iterations = g.rounds.size();
      out.solution = g.genome;
      out.f = g.value;
      return out;
    }
    case AlgorithmKind::gsemo: {
      GsemoOptions o;
      o.warm = spec.warm;
      o.repair = spec.repair;
      out.trace = run_gsemo(inst, params, o).trace;
      break;
    }
    case AlgorithmKind::nsga2: {
      Nsga2Options o;
      o.warm = spec.warm;
      o.repair = spec.repair;
      o.pop_size = spec.pop_size;
      out.trace = run_nsga2(inst, params, o).trace;
      break;
    }
    case AlgorithmKind::mu1ea: {
      MuPlusOneOptions o;
      o.warm = spec.warm;
      o.repair = spec.repair;
      o.mu = spec.mu;
      out.trace = run_mu_plus_one_ea(inst, params, o).trace;
      break;
    }
  }
  out.solution = out.trace.final_genome;
  out.f = out.trace.final_f;
  out.uses_warm_start = spec.warm;
  return out;
}

inline std::string trace_csv(const Trace& trace) {
  std::string s = "evals,best_f,best_size\n";
  for (const auto& r : trace.records) {
    s += std::to_string(r.evals) + "," + format_exact(r.best_f) + "," +
         std::to_string(r.best_size) + "\n";
  }
  return s;
}

struct ResultInfo {
  std::string instance;
  std::string algorithm;
  std::size_t k = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::size_t eval_budget = 0;
  std::optional<double> wall_ms;
};

inline nlohmann::ordered_json result_json(const Instance& inst, const ResultInfo& info,
                                          const RunOutcome& run) {
  nlohmann::ordered_json j;
  j["instance"] = info.instance;
  j["algorithm"] = info.algorithm;
  j["k"] = info.k;
  j["N"] = info.N;
  j["seed"] = info.seed;
  j["eval_budget"] = info.eval_budget;
  j["evals_used"] = run.trace.evals_used;
  if (info.wall_ms) j["wall_ms"] = *info.wall_ms;
  j["f"] = run.f;
  j["size"] = run.solution.count();
  std::vector<std::string> ids;
  for (auto v : run.solution.indices()) ids.push_back(inst.peptide_ids[v]);
  std::sort(ids.begin(), ids.end());
  j["solution"] = ids;
  j["feasibility"] = {
      {"feasible", is_feasible(run.solution, info.k, inst.graph)},
      {"size_within_k", run.solution.count() <= info.k},
      {"violated_edges", count_violations(run.solution, inst.graph)},
  };
  if (run.uses_warm_start && run.trace.warm_start_f) {
    j["warm_start_f"] = *run.trace.warm_start_f;
    j["warm_start_evals"] = run.trace.warm_start_evals;
  }
  return j;
}

/// floor(0.25 k) unless an explicit N is configured; at least 1, since N = 0
/// makes f identically zero.
inline std::size_t default_redundancy(std::size_t k) { return std::max<std::size_t>(1, k / 4); }

/// 20 k n unless an explicit budget is configured.
inline std::size_t default_budget(std::size_t k, std::size_t n) { return 20 * k * n; }

/// Error in a bench configuration, prefixed with its location in the file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::string instance;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::size_t> ks;
  std::optional<std::size_t> N;       // unset = floor(0.25 k)
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> budget;  // unset = 20 k n
  std::string output;

  /// JSON object: {"instance", "algorithms": [...], "k": [...],
  /// "N": int | "floor(0.25k)", "seeds": [...] | {"start", "count"},
  /// "eval_budget": int | "20kn", "output"}.
  static BenchConfig parse(const std::string& text, const std::string& origin = "config") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(origin + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
    auto fail = [&](const std::string& path, const std::string& msg) {
      throw ConfigError(origin + ": " + path + ": " + msg);
    };
    if (!j.is_object()) fail("/", "expected an object");
    BenchConfig c;
    auto require = [&](const char* key) -> const nlohmann::json& {
      if (!j.contains(key)) fail(std::string("/") + key, "missing");
      return j.at(key);
    };
    const auto& inst = require("instance");
    if (!inst.is_string()) fail("/instance", "expected a string");
    c.instance = inst.get<std::string>();

    const auto& algs = require("algorithms");
    if (!algs.is_array() || algs.empty()) fail("/algorithms", "expected a non-empty array");
    for (std::size_t i = 0; i < algs.size(); ++i) {
      const std::string where = "/algorithms/" + std::to_string(i);
      if (!algs[i].is_string()) fail(where, "expected a string");
      try {
        c.algorithms.push_back(AlgorithmSpec::parse(algs[i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        fail(where, e.what());
      }
    }

    const auto& ks = require("k");
    if (!ks.is_array() || ks.empty()) fail("/k", "expected a non-empty array");
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!ks[i].is_number_unsigned() || ks[i].get<std::size_t>() == 0) {
        fail("/k/" + std::to_string(i), "expected a positive integer");
      }
      c.ks.push_back(ks[i].get<std::size_t>());
    }

    if (j.contains("N")) {
      const auto& n = j.at("N");
      if (n.is_number_unsigned()) {
        c.N = n.get<std::size_t>();
      } else if (!(n.is_string() && n.get<std::string>() == "floor(0.25k)")) {
        fail("/N", "expected a non-negative integer or \"floor(0.25k)\"");
      }
    }

    const auto& seeds = require("seeds");
    if (seeds.is_array()) {
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!seeds[i].is_number_unsigned()) fail("/seeds/" + std::to_string(i), "expected an integer");
        c.seeds.push_back(seeds[i].get<std::uint64_t>());
      }
    } else if (seeds.is_object()) {
      if (!seeds.contains("count") || !seeds.at("count").is_number_unsigned()) {
        fail("/seeds/count", "expected an integer");
      }
      std::uint64_t start = 1;
      if (seeds.contains("start")) {
        if (!seeds.at("start").is_number_unsigned()) fail("/seeds/start", "expected an integer");
        start = seeds.at("start").get<std::uint64_t>();
      }
      for (std::uint64_t i = 0; i < seeds.at("count").get<std::uint64_t>(); ++i) {
        c.seeds.push_back(start + i);
      }
    } else {
      fail("/seeds", "expected an array or {\"start\", \"count\"}");
    }
    if (c.seeds.empty()) fail("/seeds", "at least one seed required");

    if (j.contains("eval_budget")) {
      const auto& b = j.at("eval_budget");
      if (b.is_number_unsigned() && b.get<std::size_t>() > 0) {
        c.budget = b.get<std::size_t>();
      } else if (!(b.is_string() && b.get<std::string>() == "20kn")) {
        fail("/eval_budget", "expected a positive integer or \"20kn\"");
      }
    }
    c.output = j.value("output", std::string("bench-out"));
    return c;
  }
};

struct SummaryRow {
  std::string algorithm;
  std::size_t k = 0;
  std::size_t N = 0;
  std::size_t seeds = 0;
  double mean_f = 0.0;
  double std_f = 0.0;
  double delta_vs_greedy = 0.0;
};

/// Welford mean and sample standard deviation. Identical samples give their
/// common value back exactly.
inline std::pair<double, double> mean_and_stddev(const std::vector<double>& xs) {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double x : xs) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  const double sd = count > 1 ? std::sqrt(std::max(0.0, m2) / static_cast<double>(count - 1)) : 0.0;
  return {count == 1 ? xs.front() : mean, sd};
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "algorithm,k,N,seeds,mean_f,std_f,delta_vs_greedy\n";
  for (const auto& r : rows) {
    s += r.algorithm + "," + std::to_string(r.k) + "," + std::to_string(r.N) + "," +
         std::to_string(r.seeds) + "," + format_exact(r.mean_f) + "," + format_exact(r.std_f) +
         "," + format_exact(r.delta_vs_greedy) + "\n";
  }
  return s;
}

inline std::string trace_file_name(const AlgorithmSpec& spec, std::size_t k, std::uint64_t seed) {
  std::string name = spec.text;
  for (auto& ch : name) {
    if (ch == ':' || ch == '=' || ch == '/') ch = '_';
  }
  return name + "_k" + std::to_string(k) + "_seed" + std::to_string(seed) + ".csv";
}

/// Runs the algorithm x k x seed grid over `workers` threads (each run is
/// single-threaded), writes one trace CSV per run under <output>/traces and
/// returns the summary rows in grid order.
inline std::vector<SummaryRow> run_bench(const Instance& inst, const BenchConfig& cfg,
                                         unsigned workers) {
  const std::size_t n = inst.peptide_count();
  for (auto k : cfg.ks) {
    if (k > n) throw ConfigError("k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  }
  const fs::path out_dir = cfg.output;
  fs::create_directories(out_dir / "traces");

  struct Cell {
    std::size_t alg, kidx, sidx;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
      for (std::size_t si = 0; si < cfg.seeds.size(); ++si) cells.push_back({a, ki, si});
    }
  }
  auto N_for = [&](std::size_t k) { return std::min(k, cfg.N.value_or(default_redundancy(k))); };
  auto params_for = [&](std::size_t k, std::uint64_t seed) {
    RunParams p;
    p.k = k;
    p.N = N_for(k);
    p.seed = seed;
    p.eval_budget = cfg.budget.value_or(default_budget(k, n));
    p.threads = 1;
    return p;
  };

  std::vector<double> final_f(cells.size(), 0.0);
  std::vector<double> greedy_f(cfg.ks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= cells.size() + cfg.ks.size()) return;
      try {
        if (job < cfg.ks.size()) {
          const std::size_t k = cfg.ks[job];
          greedy_f[job] = optivax_p(inst, k, N_for(k)).value;
          continue;
        }
        const Cell& c = cells[job - cfg.ks.size()];
        const auto& spec = cfg.algorithms[c.alg];
        const std::size_t k = cfg.ks[c.kidx];
        const std::uint64_t seed = cfg.seeds[c.sidx];
        const auto run = run_algorithm(inst, spec, params_for(k, seed));
        final_f[job - cfg.ks.size()] = run.f;
        write_file_atomic(out_dir / "traces" / trace_file_name(spec, k, seed), trace_csv(run.trace));
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(worker);
    worker();
  }
  if (!error.empty()) throw std::runtime_error(error);

  std::vector<SummaryRow> rows;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    for (std::size_t ki = 0; ki < cfg.ks.size(); ++ki) {
      std::vector<double> fs_;
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        if (cells[ci].alg == a && cells[ci].kidx == ki) fs_.push_back(final_f[ci]);
      }
      const auto [mean, sd] = mean_and_stddev(fs_);
      SummaryRow r;
      r.algorithm = cfg.algorithms[a].text;
      r.k = cfg.ks[ki];
      r.N = N_for(r.k);
      r.seeds = fs_.size();
      r.mean_f = mean;
      r.std_f = sd;
      r.delta_vs_greedy = mean - greedy_f[ki];
      rows.push_back(r);
    }
  }
  write_file_atomic(out_dir / "summary.csv", summary_csv(rows));
  return rows;
}

}  // namespace covax
