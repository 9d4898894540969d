#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "somdsa/errors.hpp"
#include "somdsa/model.hpp"
#include "somdsa/oracle.hpp"
#include "somdsa/scenario.hpp"
#include "somdsa/sim.hpp"
#include "somdsa/som.hpp"
#include "somdsa/version.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

int log_level() {
  const char* v = std::getenv("SOMDSA_LOG");
  if (!v) return 1;
  const std::string s = v;
  if (s == "debug") return 3;
  if (s == "info") return 2;
  if (s == "quiet" || s == "error") return 0;
  return 1;
}

void log_debug(const std::string& msg) {
  if (log_level() >= 3) std::cerr << "[debug] " << msg << "\n";
}

void log_info(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[info] " << msg << "\n";
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw somdsa::Error("cannot write " + path);
  out << content;
  if (!out) throw somdsa::Error("write failed for " + path);
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path;
  }
  return path.substr(0, dot);
}

// One sidecar per produced file so every output can be traced back to the
// exact flags and seed that made it. No timestamps: a re-run must produce
// the same bytes.
void write_manifests(const std::string& command, const json& config,
                     std::uint64_t seed, const std::string& fingerprint,
                     const std::vector<std::string>& outputs) {
  for (const auto& path : outputs) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["instance_fingerprint"] = fingerprint;
    m["output"] = path;
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["version"] = SOMDSA_VERSION;
    std::string text = m.dump(2);
    text.push_back('\n');
    write_file(stem_of(path) + ".manifest.json", text);
  }
}

struct GenArgs {
  int s = 0;
  int c = 0;
  double density = 0.0;
  int rmin = 1;
  int rmax = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const auto inst = somdsa::scenario::generate_instance(a.s, a.c, a.density,
                                                        a.rmin, a.rmax,
                                                        a.seed);
  const std::string fp = somdsa::model::instance_fingerprint(inst);
  write_file(a.out, somdsa::model::instance_to_json_text(inst));
  json cfg = {{"s", a.s},        {"c", a.c},       {"density", a.density},
              {"rmin", a.rmin},  {"rmax", a.rmax}, {"seed", a.seed},
              {"out", a.out}};
  write_manifests("gen", cfg, a.seed, fp, {a.out});
  std::printf("%s\n", fp.c_str());
  return 0;
}

struct SolveArgs {
  std::string input;
  std::string method = "som";
  std::uint64_t seed = 0;
  int n_epochs = 5;
  double tol = 1e-4;
  int max_outer = 200;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  const auto inst = somdsa::model::load_instance_file(a.input);
  const std::string fp = somdsa::model::instance_fingerprint(inst);
  log_debug("loaded " + a.input + " fingerprint " + fp);

  json cfg = {{"input", a.input},     {"method", a.method},
              {"seed", a.seed},       {"n_epochs", a.n_epochs},
              {"tol", a.tol},         {"max_outer", a.max_outer},
              {"out", a.out}};
  std::vector<std::string> outputs;
  int code = 0;
  const auto start = Clock::now();

  if (a.method == "som") {
    somdsa::som::SolverConfig sc;
    sc.seed = a.seed;
    sc.n_epochs = a.n_epochs;
    sc.tol = a.tol;
    sc.max_outer_steps = a.max_outer;
    const auto res = somdsa::som::solve(inst, sc);
    const double ms = ms_since(start);
    write_file(a.out, somdsa::som::result_to_json_text(res));
    const std::string trace_path = stem_of(a.out) + ".trace.csv";
    write_file(trace_path, somdsa::som::trace_to_csv_text(res.trace));
    outputs = {a.out, trace_path};
    std::printf("method=som cost=%lld converged=%s outer_steps=%d "
                "elapsed_ms=%.3f\n",
                res.cost, res.converged ? "true" : "false", res.outer_steps,
                ms);
    if (!res.converged) code = 2;
  } else {
    somdsa::oracle::SolveReport rep;
    if (a.method == "exact") {
      rep = somdsa::oracle::exact_solve(inst);
    } else if (a.method == "greedy") {
      rep = somdsa::oracle::greedy_solve(inst);
    } else {
      rep = somdsa::oracle::random_solve(inst, a.seed);
    }
    write_file(a.out, somdsa::oracle::report_to_json_text(rep));
    outputs = {a.out};
    std::printf("method=%s cost=%lld elapsed_ms=%.3f\n", a.method.c_str(),
                rep.cost, rep.elapsed_ms);
  }

  write_manifests("solve", cfg, a.seed, fp, outputs);
  return code;
}

struct SimArgs {
  std::string input;
  std::string events;
  std::uint64_t seed = 0;
  int n_epochs = 5;
  double tol = 1e-4;
  int max_outer = 200;
  bool warm_start = false;
  std::string out;
};

int run_simulate(const SimArgs& a) {
  const auto inst = somdsa::model::load_instance_file(a.input);
  const std::string fp = somdsa::model::instance_fingerprint(inst);
  const auto events = somdsa::scenario::load_events_file(a.events);
  log_debug("loaded " + std::to_string(events.size()) + " events");

  somdsa::sim::SimConfig sc;
  sc.solver.seed = a.seed;
  sc.solver.n_epochs = a.n_epochs;
  sc.solver.tol = a.tol;
  sc.solver.max_outer_steps = a.max_outer;
  sc.warm_start = a.warm_start;

  const auto result = somdsa::sim::run_simulation(inst, events, sc);
  for (const auto& step : result.steps) {
    log_info("tick " + std::to_string(step.tick) + " outer_steps " +
             std::to_string(step.outer_steps));
  }

  write_file(a.out, somdsa::sim::metrics_to_csv_text(result.metrics));
  const std::string final_path = stem_of(a.out) + ".final.json";
  write_file(final_path, somdsa::sim::final_to_json_text(result));

  json cfg = {{"input", a.input},       {"events", a.events},
              {"seed", a.seed},         {"n_epochs", a.n_epochs},
              {"tol", a.tol},           {"max_outer", a.max_outer},
              {"warm_start", a.warm_start}, {"out", a.out}};
  write_manifests("simulate", cfg, a.seed, fp, {a.out, final_path});

  bool all_converged = true;
  for (const auto& step : result.steps) {
    if (!step.converged) all_converged = false;
  }
  const auto& last = result.metrics.back();
  std::printf("resolves=%zu final_cost=%lld final_satisfaction=%.12g "
              "converged=%s\n",
              result.metrics.size(), last.cost, last.satisfaction,
              all_converged ? "true" : "false");
  return all_converged ? 0 : 2;
}

struct BenchArgs {
  int s = 3;
  int c = 4;
  int rmin = 1;
  int rmax = 2;
  std::vector<double> densities;
  int seeds = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  const std::vector<double> densities =
      a.densities.empty() ? std::vector<double>{0.3} : a.densities;

  std::string csv = "instance,method,cost,optimal_gap,elapsed_ms\n";
  struct Tally {
    long long gap_sum = 0;
    long long matches = 0;
    long long zero_matches = 0;
  };
  std::map<std::string, Tally> tally;
  long long instances = 0;
  long long zero_optimal = 0;
  char buf[256];

  for (double density : densities) {
    for (int i = 0; i < a.seeds; ++i) {
      const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
      const auto inst = somdsa::scenario::generate_instance(
          a.s, a.c, density, a.rmin, a.rmax, seed);
      std::snprintf(buf, sizeof(buf), "S%d_C%d_d%g_s%llu", a.s, a.c, density,
                    static_cast<unsigned long long>(seed));
      const std::string id = buf;
      ++instances;

      const auto exact = somdsa::oracle::exact_solve(inst);
      if (exact.cost == 0) ++zero_optimal;

      somdsa::som::SolverConfig sc;
      sc.seed = seed;
      const auto som_res = [&] {
        const auto t0 = Clock::now();
        auto r = somdsa::som::solve(inst, sc);
        return std::pair{std::move(r), ms_since(t0)};
      }();

      struct Row {
        const char* method;
        long long cost;
        double ms;
      };
      const auto greedy = somdsa::oracle::greedy_solve(inst);
      const auto random = somdsa::oracle::random_solve(inst, seed);
      const Row rows[] = {
          {"exact", exact.cost, exact.elapsed_ms},
          {"greedy", greedy.cost, greedy.elapsed_ms},
          {"random", random.cost, random.elapsed_ms},
          {"som", som_res.first.cost, som_res.second},
      };
      for (const auto& row : rows) {
        const long long gap = row.cost - exact.cost;
        std::snprintf(buf, sizeof(buf), "%s,%s,%lld,%lld,%.3f\n", id.c_str(),
                      row.method, row.cost, gap, row.ms);
        csv += buf;
        auto& t = tally[row.method];
        t.gap_sum += gap;
        if (gap == 0) ++t.matches;
        if (exact.cost == 0 && row.cost == 0) ++t.zero_matches;
      }
    }
  }

  write_file(a.out, csv);
  json cfg = {{"s", a.s},           {"c", a.c},
              {"rmin", a.rmin},     {"rmax", a.rmax},
              {"density", densities}, {"seeds", a.seeds},
              {"seed", a.seed},     {"out", a.out}};
  write_manifests("bench", cfg, a.seed, "", {a.out});

  std::printf("instances=%lld zero_optimal=%lld\n", instances, zero_optimal);
  for (const char* m : {"exact", "greedy", "random", "som"}) {
    const auto& t = tally[m];
    std::printf("method=%s mean_gap=%.4f match_rate=%.4f", m,
                static_cast<double>(t.gap_sum) / instances,
                static_cast<double>(t.matches) / instances);
    if (zero_optimal > 0) {
      std::printf(" zero_opt_rate=%.4f",
                  static_cast<double>(t.zero_matches) / zero_optimal);
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum assignment solver and simulator"};
  app.set_version_flag("--version", SOMDSA_VERSION);
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a random network instance");
  gen->add_option("--s", gen_args.s, "number of spectrum controllers")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--c", gen_args.c, "number of channels")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--density", gen_args.density,
                  "expected interfering-pair fraction")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--rmin", gen_args.rmin, "minimum per-SC demand");
  gen->add_option("--rmax", gen_args.rmax, "maximum per-SC demand");
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("-o,--out", gen_args.out, "instance file to write")
      ->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("-i,--input", solve_args.input, "instance file")
      ->required();
  solve->add_option("--method", solve_args.method, "solver to run")
      ->check(CLI::IsMember({"som", "exact", "greedy", "random"}));
  solve->add_option("--seed", solve_args.seed, "RNG seed");
  solve->add_option("--n-epochs", solve_args.n_epochs,
                    "presentation epochs per schedule step");
  solve->add_option("--tol", solve_args.tol, "weight-change threshold");
  solve->add_option("--max-outer", solve_args.max_outer,
                    "schedule step bound");
  solve->add_option("-o,--out", solve_args.out, "result file to write")
      ->required();

  SimArgs sim_args;
  auto* simulate = app.add_subcommand("simulate",
                                      "replay events and re-allocate");
  simulate->add_option("-i,--input", sim_args.input, "instance file")
      ->required();
  simulate->add_option("-e,--events", sim_args.events, "events file (JSONL)")
      ->required();
  simulate->add_option("--seed", sim_args.seed, "RNG seed");
  simulate->add_option("--n-epochs", sim_args.n_epochs,
                       "presentation epochs per schedule step");
  simulate->add_option("--tol", sim_args.tol, "weight-change threshold");
  simulate->add_option("--max-outer", sim_args.max_outer,
                       "schedule step bound");
  simulate->add_flag("--warm-start", sim_args.warm_start,
                     "seed each re-solve from the previous weights");
  simulate->add_option("-o,--out", sim_args.out, "metrics CSV to write")
      ->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench",
                                   "compare methods over an instance family");
  bench->add_option("--s", bench_args.s, "number of spectrum controllers")
      ->check(CLI::PositiveNumber);
  bench->add_option("--c", bench_args.c, "number of channels")
      ->check(CLI::PositiveNumber);
  bench->add_option("--rmin", bench_args.rmin, "minimum per-SC demand");
  bench->add_option("--rmax", bench_args.rmax, "maximum per-SC demand");
  bench->add_option("--density", bench_args.densities,
                    "density grid (repeatable)")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seeds", bench_args.seeds, "instances per density")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.seed, "base RNG seed");
  bench->add_option("-o,--out", bench_args.out, "comparison CSV to write")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return run_gen(gen_args);
    if (*solve) return run_solve(solve_args);
    if (*simulate) return run_simulate(sim_args);
    if (*bench) return run_bench(bench_args);
  } catch (const somdsa::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
