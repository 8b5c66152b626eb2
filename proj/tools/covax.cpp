// covax: generate, validate, solve and benchmark peptide-vaccine instances.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "covax/covax.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

covax::Instance load_or_report(const std::string& dir) {
  std::vector<std::string> warnings;
  auto inst = covax::load_instance(dir, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return inst;
}

struct GenerateArgs {
  covax::GenParams params;
  std::string weights = "dirichlet";
  std::uint64_t seed = 1;
  std::size_t adversarial = 0;
  bool pair_remaining = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  covax::Instance inst;
  if (a.adversarial > 0) {
    inst = covax::generate_adversarial(a.adversarial, a.pair_remaining);
  } else {
    auto p = a.params;
    p.weight_law = a.weights == "uniform" ? covax::WeightLaw::uniform : covax::WeightLaw::dirichlet;
    try {
      inst = covax::generate_synthetic(p, a.seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  covax::save_instance(inst, a.out);
  std::cout << "n=" << inst.peptide_count() << " m=" << inst.genotype_count()
            << " edges=" << inst.graph.edge_count() << " max_degree=" << covax::max_degree(inst)
            << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string algorithm = "gsemo-wr";
  std::size_t k = 0;
  std::optional<std::size_t> N;
  std::uint64_t seed = 1;
  std::optional<std::size_t> budget;
  std::size_t max_iterations = 0;
  std::string out = "result.json";
  std::string trace = "trace.csv";
  bool wall_time = false;
};

int cmd_solve(const SolveArgs& a) {
  covax::AlgorithmSpec spec;
  try {
    spec = covax::AlgorithmSpec::parse(a.algorithm);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto inst = load_or_report(a.instance);
  const std::size_t n = inst.peptide_count();
  if (a.k == 0 || a.k > n) {
    throw UsageError("k must lie in [1, n] (n=" + std::to_string(n) + ")");
  }
  covax::RunParams params;
  params.k = a.k;
  params.N = std::min(a.k, a.N.value_or(covax::default_redundancy(a.k)));
  params.seed = a.seed;
  params.eval_budget = a.budget.value_or(covax::default_budget(a.k, n));
  params.max_iterations = a.max_iterations;
  params.threads = covax::worker_count();

  const auto start = std::chrono::steady_clock::now();
  const auto run = covax::run_algorithm(inst, spec, params);
  const auto stop = std::chrono::steady_clock::now();

  covax::ResultInfo info;
  info.instance = a.instance;
  info.algorithm = spec.text;
  info.k = params.k;
  info.N = params.N;
  info.seed = params.seed;
  info.eval_budget = params.eval_budget;
  if (a.wall_time) {
    info.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  const auto json = covax::result_json(inst, info, run);
  covax::write_file_atomic(a.out, json.dump(2) + "\n");
  covax::write_file_atomic(a.trace, covax::trace_csv(run.trace));
  std::cout << covax::format_exact(run.f) << "\n";
  return covax::is_feasible(run.solution, params.k, inst.graph) ? kExitOk : kExitFailure;
}

int cmd_bench(const std::string& config_path) {
  covax::BenchConfig cfg;
  try {
    cfg = covax::BenchConfig::parse(covax::read_file(config_path), config_path);
  } catch (const covax::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
  const auto inst = load_or_report(cfg.instance);
  const auto rows = covax::run_bench(inst, cfg, covax::worker_count());
  std::cout << covax::summary_csv(rows);
  return kExitOk;
}

int cmd_validate(const std::string& dir, std::size_t N, std::size_t samples, std::uint64_t seed) {
  covax::Instance inst;
  try {
    inst = load_or_report(dir);
  } catch (const covax::InstanceError& e) {
    for (const auto& issue : e.issues()) std::cerr << issue << "\n";
    return kExitFailure;
  }
  auto issues = covax::check_invariants(inst);
  for (const auto& issue : issues) std::cerr << dir << ": " << issue << "\n";
  covax::Rng rng(seed);
  const auto audit = covax::audit_properties(inst, N, samples, rng);
  if (audit.monotonicity_violations > 0) {
    std::cerr << dir << ": " << audit.monotonicity_violations
              << " monotonicity violations (min step " << covax::format_exact(audit.min_monotone_step)
              << ")\n";
  }
  if (audit.submodularity_violations > 0) {
    std::cerr << dir << ": " << audit.submodularity_violations
              << " submodularity violations (min gap " << covax::format_exact(audit.min_gain_gap)
              << ")\n";
  }
  const bool ok = issues.empty() && audit.clean();
  std::cout << (ok ? "ok" : "invalid") << ": n=" << inst.peptide_count()
            << " m=" << inst.genotype_count() << " edges=" << inst.graph.edge_count()
            << " audits=" << audit.monotonicity_checks + audit.submodularity_checks << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_build_graph(const std::string& dir, std::size_t threshold) {
  auto inst = load_or_report(dir);
  if (!inst.has_sequences()) {
    std::cerr << (covax::fs::path(dir) / "peptides.tsv").string() << ": no sequence column\n";
    return kExitFailure;
  }
  inst.graph = covax::build_similarity_graph(inst.peptide_sequences, threshold);
  covax::save_instance(inst, dir);
  std::cout << "edges=" << inst.graph.edge_count() << " max_degree=" << covax::max_degree(inst)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peptide vaccine design: coverage-maximizing subset selection"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic or adversarial instance");
  generate->add_option("--n", gen.params.n, "Number of peptides")->check(CLI::PositiveNumber);
  generate->add_option("--m", gen.params.m_count, "Number of MHC genotypes");
  generate->add_option("--edge-density", gen.params.edge_density, "Similarity edge probability");
  generate->add_option("--binding-sparsity", gen.params.binding_sparsity,
                       "Probability that a peptide binds a genotype");
  generate->add_option("--prob-lo", gen.params.prob_lo, "Lowest binding probability");
  generate->add_option("--prob-hi", gen.params.prob_hi, "Highest binding probability");
  generate->add_option("--weights", gen.weights, "Genotype weight law")
      ->check(CLI::IsMember({"uniform", "dirichlet"}));
  generate->add_option("--sequence-length", gen.params.sequence_length, "Peptide length");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--adversarial", gen.adversarial,
                       "Write the greedy trap instance with this many peptides");
  generate->add_flag("--pair-remaining", gen.pair_remaining,
                     "Pair up the filler peptides of the trap instance");
  generate->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one algorithm on an instance");
  solve_cmd->add_option("--instance", solve.instance, "Instance directory")->required();
  solve_cmd->add_option("--algorithm", solve.algorithm,
                        "greedy | gsemo[-w|-r|-wr] | nsga2[-wr][:pop=P] | mu1ea[-wr][:mu=M]");
  solve_cmd->add_option("--k", solve.k, "Cardinality bound")->required();
  solve_cmd->add_option("--N", solve.N, "Redundancy threshold (default max(1, floor(k/4)))");
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--budget", solve.budget, "Evaluation budget (default 20kn)");
  solve_cmd->add_option("--max-iterations", solve.max_iterations, "Iteration cap (0 = none)");
  solve_cmd->add_option("--out", solve.out, "Result JSON path");
  solve_cmd->add_option("--trace", solve.trace, "Trace CSV path");
  solve_cmd->add_flag("--wall-time", solve.wall_time, "Record wall_ms in the result");

  std::string config;
  auto* bench = app.add_subcommand("bench", "Run an algorithm x k x seed grid");
  bench->add_option("config", config, "Bench configuration JSON")->required();

  std::string validate_dir;
  std::size_t validate_N = 1;
  std::size_t validate_samples = 100;
  std::uint64_t validate_seed = 1;
  auto* validate = app.add_subcommand("validate", "Check instance invariants and audit f");
  validate->add_option("--instance", validate_dir, "Instance directory")->required();
  validate->add_option("--N", validate_N, "Redundancy threshold used by the audit");
  validate->add_option("--samples", validate_samples, "Audit samples per property");
  validate->add_option("--seed", validate_seed, "Audit seed");

  std::string graph_dir;
  std::size_t threshold = 6;
  auto* build_graph =
      app.add_subcommand("build-graph", "Rebuild edges.tsv from peptide edit distances");
  build_graph->add_option("--instance", graph_dir, "Instance directory")->required();
  build_graph->add_option("--threshold", threshold, "Maximum edit distance for an edge");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*solve_cmd) return cmd_solve(solve);
    if (*bench) return cmd_bench(config);
    if (*validate) return cmd_validate(validate_dir, validate_N, validate_samples, validate_seed);
    if (*build_graph) return cmd_build_graph(graph_dir, threshold);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const covax::InstanceError& e) {
    for (const auto& issue : e.issues()) std::cerr << issue << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
