// reuse: population search over a frozen generator's input noise space.
//
//   reuse run <config.json>      run a seeded search, write artifacts
//   reuse verify --suite <name>  property suites over seeded runs
//   reuse analyze <trace.jsonl>  reports over a recorded trace

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reuse/analysis.hpp"
#include "reuse/config_io.hpp"
#include "reuse/engine.hpp"
#include "reuse/trace_io.hpp"
#include "reuse/verify.hpp"

namespace fs = std::filesystem;
using namespace reuse;

namespace {

std::size_t workers_from_env() {
  const char* raw = std::getenv("REUSE_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  unsigned long v = std::strtoul(raw, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1) return 1;
  return static_cast<std::size_t>(v);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> iterations, std::string output_dir,
            std::size_t workers) {
  RunConfigDocument doc;
  try {
    doc = load_run_config(config_path);
    if (iterations) doc.search.T = *iterations;
    finalize_run_config(doc, seed ? *seed : doc.search.seed);
  } catch (const config_error& e) {
    std::fprintf(stderr, "reuse run: %s\n", e.what());
    return 2;
  }
  if (output_dir.empty()) output_dir = doc.output.directory;

  RunOptions opts;
  opts.workers = workers;
  RunResult result = run_search(doc.task, doc.search, opts);

  fs::path dir(output_dir);
  try {
    fs::create_directories(dir);
    write_trace(dir / "trace.jsonl", result.trace);
    write_panel(dir / "panel.json", result.incumbent);
    write_metrics(dir / "metrics.csv", result, 4.0, 4.0);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "reuse run: %s\n", e.what());
    return 3;
  }

  std::size_t pooled = 0;
  for (const TraceRecord& rec : result.trace) pooled += rec.candidates.size();
  std::printf("seed %llu  iterations %zu  pooled candidates %zu  cost %.1f  wall %.3fs\n",
              static_cast<unsigned long long>(result.seed), result.trace.size(),
              pooled, result.total_cost, result.wall_seconds);
  if (result.incumbent.empty()) {
    std::printf("no feasible panel found; empty panel written to %s\n",
                (dir / "panel.json").string().c_str());
  } else {
    std::printf("incumbent utility %.6f from iteration %d, %zu members -> %s\n",
                result.incumbent.utility, result.incumbent.source_iteration,
                result.incumbent.members.size(), dir.string().c_str());
  }
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t runs) {
  std::vector<verify::CheckResult> results;
  try {
    results = verify::run_suite(suite, seed, runs);
  } catch (const config_error& e) {
    std::fprintf(stderr, "reuse verify: %s\n", e.what());
    return 2;
  }
  for (const verify::CheckResult& c : results)
    std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
  return verify::all_passed(results) ? 0 : 1;
}

std::vector<std::size_t> default_budgets(std::span<const TraceRecord> trace) {
  std::size_t n = 0;
  for (const TraceRecord& rec : trace) n += rec.offspring.size();
  std::vector<std::size_t> budgets;
  for (std::size_t b : {n / 4, n / 2, (3 * n) / 4, n}) {
    b = std::max<std::size_t>(b, 1);
    if (budgets.empty() || budgets.back() != b) budgets.push_back(b);
  }
  return budgets;
}

int cmd_analyze(const std::string& trace_path, const std::string& report,
                const std::string& config_path,
                const std::vector<std::size_t>& budget_list, double thr_a,
                double thr_b) {
  std::vector<TraceRecord> trace;
  SearchConfig cfg = default_config();
  try {
    trace = read_trace(trace_path);
    if (!config_path.empty()) {
      RunConfigDocument doc = load_run_config(config_path);
      finalize_run_config(doc, doc.search.seed);
      cfg = doc.search;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "reuse analyze: %s\n", e.what());
    return 2;
  }

  try {
    if (report == "budget") {
      std::vector<std::size_t> budgets =
          budget_list.empty() ? default_budgets(trace) : budget_list;
      auto rows = analysis::budget_table(trace, budgets);
      std::printf("budget,best_so_far,chem_recovered\n");
      for (const auto& row : rows)
        std::printf("%zu,%s,%d\n", row.budget,
                    format_csv_number(row.best_so_far).c_str(),
                    row.chem_recovered ? 1 : 0);
    } else if (report == "funnel") {
      std::printf("metric,value\n");
      for (const auto& e : analysis::funnel_report(trace))
        std::printf("%s,%s\n", e.metric.c_str(),
                    format_csv_number(e.value).c_str());
    } else if (report == "consistency") {
      std::printf("metric,value\n");
      for (const auto& e : analysis::consistency_report(trace))
        std::printf("%s,%s\n", e.metric.c_str(),
                    format_csv_number(e.value).c_str());
    } else if (report == "prepost") {
      auto rows = analysis::pre_post_selection_compare(trace, cfg, thr_a, thr_b);
      std::printf("slice,size,dual_hit,feasible_dual_hit,worst_target_mean\n");
      for (const auto& row : rows)
        std::printf("%s,%zu,%s,%s,%s\n", row.slice.c_str(), row.size,
                    format_csv_number(row.dual_hit).c_str(),
                    format_csv_number(row.feasible_dual_hit).c_str(),
                    format_csv_number(row.worst_target_mean).c_str());
    }
  } catch (const input_error& e) {
    std::fprintf(stderr, "reuse analyze: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical evolutionary search over a generator's noise space"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a seeded search");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::string output_dir;
  std::size_t workers = workers_from_env();
  run->add_option("config", config_path, "run configuration (JSON)")
      ->required();
  run->add_option("--seed", seed, "override the configured seed");
  run->add_option("--iterations", iterations, "override the iteration count");
  run->add_option("--output-dir", output_dir,
                  "artifact directory (default from config)");
  run->add_option("--workers", workers,
                  "worker threads (default REUSE_WORKERS or 1); never changes "
                  "output bytes");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
  std::string suite;
  std::uint64_t verify_seed = 1234;
  std::size_t verify_runs = 20;
  verify_cmd->add_option("--suite", suite, "theorems | funnel | panel | hitting")
      ->required();
  verify_cmd->add_option("--runs", verify_runs, "seeded repetitions per check");
  verify_cmd->add_option("--seed", verify_seed, "base seed");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "report over a recorded trace");
  std::string trace_path, report, analyze_config;
  std::vector<std::size_t> budget_list;
  double thr_a = 4.0, thr_b = 4.0;
  analyze->add_option("trace", trace_path, "trace.jsonl from a run")->required();
  analyze->add_option("--report", report, "budget | funnel | consistency | prepost")
      ->required()
      ->check(CLI::IsMember({"budget", "funnel", "consistency", "prepost"}));
  analyze->add_option("--config", analyze_config,
                      "config for report parameters (default: built-in)");
  analyze->add_option("--budgets", budget_list,
                      "offspring budgets for the budget report");
  analyze->add_option("--thr-a", thr_a, "dual-hit threshold, target A");
  analyze->add_option("--thr-b", thr_b, "dual-hit threshold, target B");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return cmd_run(config_path, seed, iterations, output_dir, workers);
  if (verify_cmd->parsed()) return cmd_verify(suite, verify_seed, verify_runs);
  if (analyze->parsed())
    return cmd_analyze(trace_path, report, analyze_config, budget_list, thr_a,
                       thr_b);
  return 1;
}
