// Acceptance suite: one PASS/FAIL line per criterion.
//
//   covax_acceptance            run every criterion
//   covax_acceptance 3 11       run the listed criteria only
//
// Exit status is 0 iff every criterion that ran passed.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "covax/covax.hpp"

using namespace covax;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

GenParams params(std::size_t n, std::size_t m, double density, double sparsity = 0.2) {
  GenParams p;
  p.n = n;
  p.m_count = m;
  p.edge_density = density;
  p.binding_sparsity = sparsity;
  return p;
}

RunParams run_params(std::size_t k, std::size_t N, std::uint64_t seed, std::size_t budget) {
  RunParams p;
  p.k = k;
  p.N = N;
  p.seed = seed;
  p.eval_budget = budget;
  return p;
}

fs::path scratch_dir(const std::string& tag) {
  const auto dir =
      fs::temp_directory_path() / ("covax_acceptance_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(1);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const std::size_t n = 2 + rng.index(14);
    const std::size_t m = 1 + rng.index(8);
    GenParams p = params(n, m, 0.0, 0.2 + 0.8 * rng.uniform());
    p.prob_lo = 0.001;
    p.prob_hi = 0.999;
    const auto inst = generate_synthetic(p, 10000 + i);
    Genome g(n);
    const double density = rng.uniform();
    for (std::size_t v = 0; v < n; ++v) {
      if (rng.bernoulli(density)) g.set(v);
    }
    const std::size_t N = 1 + rng.index(std::max<std::size_t>(1, g.count() + 1));
    const double fast = eval_from_scratch(inst, g, N).value;
    const double slow = enumerate_expectation(inst, g.indices(), N);
    worst = std::max(worst, std::abs(fast - slow));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 30.0,
          fmt("500 instances, max |scratch - enumeration| = %.3g (tol 1e-10), %.2f s (limit 30 s)",
              worst, secs)};
}

Outcome incremental_correctness() {
  const auto t0 = Clock::now();
  const std::size_t n = 60, k = 20, N = 5, steps = 1000;
  double worst = 0.0;
  std::size_t rebuilt = 0;
  std::size_t chains = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GenParams p = params(n, 200, 0.0, 0.5);
    p.prob_lo = seed % 2 ? 0.001 : 0.9;
    p.prob_hi = seed % 2 ? 0.999 : kMaxProbability;
    const auto inst = generate_synthetic(p, seed);
    const CoverageObjective obj(inst, k, N);
    Rng rng(seed);
    Genome g(n);
    auto table = obj.evaluate(g).table;
    for (std::size_t step = 0; step < steps; ++step) {
      Genome next = g;
      if (g.count() == k) {
        const auto sel = g.indices();
        next.reset(sel[rng.index(sel.size())]);
      } else {
        next.flip(rng.index(n));
      }
      auto inc = obj.evaluate_from(table, next);
      worst = std::max(worst, std::abs(inc.value - obj.evaluate(next).value));
      g = std::move(next);
      table = std::move(inc.table);
    }
    rebuilt += obj.rebuilt_rows();
    ++chains;
  }
  // A chain whose removals are forced through the rebuild path: the table
  // is built under perturbed probabilities so every deconvolution is off.
  {
    GenParams p = params(n, 200, 0.0, 0.5);
    const auto inst = generate_synthetic(p, 99);
    auto skewed = inst;
    for (auto& col : skewed.bindings) {
      for (auto& b : col) b.probability = 1.0 - b.probability;
    }
    Rng rng(99);
    Genome g(n);
    for (std::size_t i = 0; i < k; ++i) g.set(rng.index(n));
    const auto stale = eval_from_scratch(skewed, g, N).table;
    std::size_t forced = 0;
    auto table = stale;
    for (auto v : g.indices()) table = apply_remove(table, inst, v, &forced);
    Genome empty(n);
    worst = std::max(worst, std::abs(coverage_value(inst, table, N) - 0.0));
    for (std::size_t m = 0; m < inst.genotype_count(); ++m) {
      worst = std::max(worst, std::abs(table.row_sum(m) - 1.0));
    }
    rebuilt += forced;
    ++chains;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 60.0 && rebuilt > 0,
          fmt("%zu chains x %zu flips (n=60, m=200, k=20) plus one stale-table chain, max drift = %.3g (tol 1e-9), "
              "%zu fallback row rebuilds, %.2f s (limit 60 s)",
              chains - 1, steps, worst, rebuilt, secs)};
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

Outcome acceleration() {
  const std::size_t n = 128, m = 2000;
  GenParams p = params(n, m, 0.0, 1.0);
  const auto inst = generate_synthetic(p, 3);
  const std::vector<std::size_t> ks = {16, 32, 64};
  // Adds and removes cost differently, so each gets its own curve; a mixed
  // median would drift with the share of set bits as k grows.
  std::vector<double> add_us, remove_us, scratch_us;
  Rng rng(3);
  volatile double sink = 0.0;
  for (auto k : ks) {
    Genome g(n);
    while (g.count() < k) g.set(rng.index(n));
    const auto parent = eval_from_scratch(inst, g, k / 4).table;
    const auto members = g.indices();
    std::vector<PeptideIndex> others;
    for (std::size_t v = 0; v < n; ++v) {
      if (!g.test(v)) others.push_back(static_cast<PeptideIndex>(v));
    }
    std::vector<double> add, remove, scr;
    auto time_flip = [&](PeptideIndex v, std::vector<double>& into) {
      Genome child = g;
      child.flip(v);
      auto t0 = Clock::now();
      sink = sink + eval_incremental(inst, parent, child, k / 4).value;
      into.push_back(seconds_since(t0) * 1e6);
      t0 = Clock::now();
      sink = sink + eval_from_scratch(inst, child, k / 4).value;
      scr.push_back(seconds_since(t0) * 1e6);
    };
    for (int rep = 0; rep < 41; ++rep) {
      time_flip(others[rng.index(others.size())], add);
      time_flip(members[rng.index(members.size())], remove);
    }
    add_us.push_back(median(add));
    remove_us.push_back(median(remove));
    scratch_us.push_back(median(scr));
  }
  bool pass = true;
  std::string text = "m=2000, n=128, dense bindings; median us per flip";
  auto curve = [&](const char* name, const std::vector<double>& us, bool bounded) {
    text += fmt("; %s:", name);
    for (std::size_t i = 0; i < ks.size(); ++i) text += fmt(" k=%zu %.0f", ks[i], us[i]);
    text += " (growth";
    for (std::size_t i = 1; i < ks.size(); ++i) {
      const double r = us[i] / us[i - 1];
      text += fmt(" %.2fx", r);
      if (bounded) pass &= r <= 2.5;
    }
    text += ")";
  };
  curve("incremental add", add_us, true);
  curve("incremental remove", remove_us, true);
  curve("scratch", scratch_us, false);
  const double scratch_total = scratch_us.back() / scratch_us.front();
  const double k_total = static_cast<double>(ks.back()) / static_cast<double>(ks.front());
  pass &= scratch_total > k_total;
  text += fmt("; scratch grows %.2fx over a %.0fx k range (super-linear iff > %.0fx)", scratch_total,
              k_total, k_total);
  return {pass, text};
}

Outcome greedy_trap() {
  const auto inst = generate_adversarial(6);
  const auto g = optivax_p(inst, 2, 2);
  const auto opt = brute_force_opt(inst, 2, 2);
  const bool pass = g.value == 1.1 && opt.optimum_value == 1.2 &&
                    opt.optimum_genome == Genome::from_string("011000") && g.genome.test(0);
  return {pass, fmt("optivax_p f = %s with {%s}, brute_force_opt f = %s with genome %s",
                    format_exact(g.value).c_str(),
                    g.genome.to_string().c_str(), format_exact(opt.optimum_value).c_str(),
                    opt.optimum_genome.to_string().c_str())};
}

Outcome escape() {
  const auto t0 = Clock::now();
  const auto inst = generate_adversarial(6);
  const std::size_t k = 2, n = 6, cap = 8 * k * n * n;
  std::size_t hits = 0;
  double worst_iter = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RunParams p = run_params(k, 2, seed, std::size_t{1} << 40);
    p.max_iterations = cap;
    std::size_t reached_at = 0;
    GsemoOptions opt;
    opt.on_iteration = [&](const GsemoArchive& a, std::size_t iter) {
      if (reached_at == 0) {
        for (const auto& mbr : a.members()) {
          if (mbr.objectives.f1 == 1.2) reached_at = iter;
        }
      }
    };
    const auto r = run_gsemo(inst, p, opt);
    if (r.trace.final_f == 1.2) {
      ++hits;
      worst_iter = std::max(worst_iter, static_cast<double>(reached_at));
    }
  }
  const double secs = seconds_since(t0);
  return {hits >= 95 && secs < 60.0,
          fmt("GSEMO-WR reached 1.2 within %zu iterations in %zu/100 runs (need 95), slowest "
              "success at iteration %.0f, %.2f s (limit 60 s)",
              cap, hits, worst_iter, secs)};
}

Outcome repair_ablation() {
  const auto inst = generate_adversarial(6);
  const std::size_t k = 2, n = 6, budget = 2 * k * n * n;
  std::size_t with = 0, without = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GsemoOptions on;
    GsemoOptions off;
    off.repair = false;
    with += run_gsemo(inst, run_params(k, 2, seed, budget), on).trace.final_f == 1.2;
    without += run_gsemo(inst, run_params(k, 2, seed, budget), off).trace.final_f == 1.2;
  }
  return {with >= without, fmt("budget %zu evaluations, 100 seeds: with repair %zu successes, "
                               "without repair %zu",
                               budget, with, without)};
}

Outcome warm_start_dominance() {
  const std::size_t k = 8, N = 2, n = 40;
  std::size_t ok_gsemo = 0, ok_nsga = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 1; i <= 50; ++i) {
    const auto inst = generate_synthetic(params(n, 100, 0.05), 700 + i);
    const double greedy = optivax_p(inst, k, N).value;
    const auto rp = run_params(k, N, i, 20 * k * n);
    const double g = run_gsemo(inst, rp).trace.final_f;
    Nsga2Options opt;
    opt.pop_size = 4 * (k + 1);
    const double s = run_nsga2(inst, rp, opt).trace.final_f;
    ok_gsemo += g >= greedy;
    ok_nsga += s >= greedy;
    min_gap = std::min({min_gap, g - greedy, s - greedy});
  }
  return {ok_gsemo == 50 && ok_nsga == 50,
          fmt("50 instances: GSEMO-WR >= greedy on %zu, NSGA-II-WR (pop 36) >= greedy on %zu, "
              "smallest margin %.3g",
              ok_gsemo, ok_nsga, min_gap)};
}

Outcome small_optimality() {
  const std::size_t n = 14, k = 4, N = 1;
  std::size_t matches = 0;
  double worst = 0.0;
  for (std::uint64_t i = 1; i <= 20; ++i) {
    const auto inst = generate_synthetic(params(n, 20, 0.15), 800 + i);
    const double opt = brute_force_opt(inst, k, N).optimum_value;
    const double got = run_gsemo(inst, run_params(k, N, i, 20 * k * n)).trace.final_f;
    matches += std::abs(got - opt) <= 1e-9;
    worst = std::max(worst, opt - got);
  }
  return {matches >= 18, fmt("GSEMO-WR matched brute_force_opt on %zu/20 instances (need 18), "
                             "largest shortfall %.3g",
                             matches, worst)};
}

Outcome structural_audits() {
  std::size_t mono = 0, sub = 0, checks = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 1; i <= 10; ++i) {
    const auto inst = generate_synthetic(params(20, 30, 0.1, 0.4), 900 + i);
    Rng rng(i);
    const auto rep = audit_properties(inst, 1 + i % 4, 10000, rng);
    mono += rep.monotonicity_violations;
    sub += rep.submodularity_violations;
    checks += rep.monotonicity_checks + rep.submodularity_checks;
    min_gap = std::min(min_gap, rep.min_gain_gap);
  }
  GenParams p = params(50, 100, 0.0, 0.3);
  p.prob_lo = 0.001;
  p.prob_hi = kMaxProbability;
  const auto inst = generate_synthetic(p, 17);
  Rng rng(17);
  auto table = HitDistributionTable::empty(inst.genotype_count());
  double worst = 0.0;
  for (std::size_t op = 0; op < 100000; ++op) {
    const auto v = static_cast<PeptideIndex>(rng.index(50));
    table = table.contains(v) ? apply_remove(table, inst, v) : apply_add(table, inst, v);
    for (const auto& b : inst.bindings_of(v)) {
      worst = std::max(worst, std::abs(table.row_sum(b.genotype) - 1.0));
    }
  }
  for (std::size_t m = 0; m < inst.genotype_count(); ++m) {
    worst = std::max(worst, std::abs(table.row_sum(m) - 1.0));
  }
  return {mono == 0 && sub == 0 && worst <= 1e-9,
          fmt("%zu audit checks on 10 instances: %zu monotonicity and %zu submodularity "
              "violations (min gain gap %.3g); 1e5 add/remove ops, max |row sum - 1| = %.3g",
              checks, mono, sub, min_gap, worst)};
}

std::vector<std::vector<std::size_t>> brute_fronts(const std::vector<ObjectivePair>& pts) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> done(pts.size(), false);
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (done[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        dominated = !done[j] && dominates(pts[j], pts[i]);
      }
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) done[i] = true;
    left -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

Outcome nsga2_machinery() {
  Rng rng(10);
  std::size_t sort_matches = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<ObjectivePair> pts(1 + rng.index(50));
    const std::size_t levels = 2 + rng.index(10);
    for (auto& p : pts) {
      p.f1 = rng.bernoulli(0.1) ? -1.0 : static_cast<double>(rng.index(levels)) / 4.0;
      p.f2 = -static_cast<double>(rng.index(levels));
    }
    sort_matches += non_dominated_sort(pts) == brute_fronts(pts);
  }

  const std::vector<ObjectivePair> line = {{0, 0}, {1, -1}, {2, -2}};
  const std::vector<std::size_t> front = {0, 1, 2};
  const auto cd = crowding_distance(line, front);
  const bool crowd_ok = std::isinf(cd[0]) && std::isinf(cd[2]) && cd[1] == 2.0;

  const auto inst = generate_synthetic(params(30, 40, 0.15), 5);
  const std::size_t k = 6;
  const CoverageObjective obj(inst, k, 2);
  RunParams p = run_params(k, 2, 5, std::size_t{1} << 40);
  p.max_iterations = 100000;
  std::size_t violations = 0;
  std::string first;
  GsemoOptions opt;
  opt.on_iteration = [&](const GsemoArchive& a, std::size_t) {
    const auto msg = a.check_invariants(obj);
    if (!msg.empty()) {
      if (violations++ == 0) first = msg;
    }
  };
  const auto r = run_gsemo(inst, p, opt);

  return {sort_matches == 200 && crowd_ok && violations == 0 && r.trace.iterations == 100000,
          fmt("non_dominated_sort matched brute force on %zu/200 populations; collinear crowding "
              "middle = %.3g (expected 2), ends infinite: %s; archive invariants broken in %zu of "
              "%zu iterations%s",
              sort_matches, cd[1], crowd_ok ? "yes" : "no", violations, r.trace.iterations,
              first.empty() ? "" : (" (" + first + ")").c_str())};
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const auto dir = scratch_dir("determinism");
  const std::string cli = COVAX_CLI_PATH;
  const auto inst = (dir / "inst").string();
  if (shell(cli + " generate --n 100 --m 5000 --seed 11 --out " + inst + " > /dev/null") != 0) {
    return {false, "instance generation failed"};
  }
  std::size_t identical = 0, compared = 0;
  for (const char* alg : {"gsemo-wr", "nsga2-wr"}) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4", "4"}) {
      const auto tag = std::string(alg) + "_" + std::to_string(outputs.size());
      const auto res = (dir / (tag + ".json")).string();
      const auto trace = (dir / (tag + ".csv")).string();
      const auto cmd = std::string("COVAX_THREADS=") + threads + " " + cli + " solve --instance " +
                       inst + " --algorithm " + alg + " --k 10 --seed 5 --budget 1500 --out " +
                       res + " --trace " + trace + " > /dev/null";
      if (shell(cmd) != 0) return {false, "solve failed: " + cmd};
      outputs.push_back(read_file(res) + "\n--\n" + read_file(trace));
    }
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      ++compared;
      identical += outputs[i] == outputs[0];
    }
  }
  fs::remove_all(dir);
  return {identical == compared,
          fmt("m=5000 instance, gsemo-wr and nsga2-wr solved twice each with COVAX_THREADS=1 "
              "and 4: %zu/%zu result+trace pairs byte-identical",
              identical, compared)};
}

Outcome desk_experiment() {
  const auto t0 = Clock::now();
  const auto dir = scratch_dir("bench");
  const auto inst = generate_synthetic(params(200, 5000, 0.02), 2023);
  BenchConfig cfg = BenchConfig::parse(R"json({"instance": "synthetic",
      "algorithms": ["greedy", "gsemo-wr", "nsga2-wr", "mu1ea-wr"],
      "k": [10, 20, 30], "N": "floor(0.25k)", "seeds": {"start": 1, "count": 10},
      "eval_budget": "20kn"})json");
  cfg.output = (dir / "out").string();
  const auto rows = run_bench(inst, cfg, worker_count());
  const bool summary = fs::exists(dir / "out" / "summary.csv");
  bool pass = summary;
  std::string detail;
  for (const auto& r : rows) {
    if (r.algorithm == "greedy") continue;
    detail += fmt(" %s k=%zu delta=%+.4g;", r.algorithm.c_str(), r.k, r.delta_vs_greedy);
    if (r.algorithm != "mu1ea-wr") pass &= r.delta_vs_greedy >= 0.0;
  }
  const double secs = seconds_since(t0);
  pass &= secs < 1800.0;
  fs::remove_all(dir);
  return {pass, fmt("summary.csv %s;", summary ? "written" : "missing") + detail +
                    fmt(" %.0f s (limit 1800 s)", secs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "evaluator oracle equivalence", oracle_equivalence},
      {2, "incremental correctness", incremental_correctness},
      {3, "incremental acceleration", acceleration},
      {4, "greedy trap", greedy_trap},
      {5, "escape property", escape},
      {6, "repair ablation direction", repair_ablation},
      {7, "warm-start dominance", warm_start_dominance},
      {8, "small-instance optimality", small_optimality},
      {9, "structural audits", structural_audits},
      {10, "NSGA-II machinery", nsga2_machinery},
      {11, "determinism", determinism},
      {12, "desk benchmark direction", desk_experiment},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
