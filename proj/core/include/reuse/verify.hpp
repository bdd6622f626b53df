#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reuse::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // diagnostic, filled on failure or with a summary
};

// Invariants of full seeded runs: incumbent monotonicity and persistence,
// panel constraint preservation, elitist population behavior, cost
// accounting. `runs` independent seeds derived from base_seed.
std::vector<CheckResult> theorems_suite(std::uint64_t base_seed,
                                        std::size_t runs);

// Funnel invariants on randomized pools: survivor nestedness, the budget
// rule, feasibility-first elimination, witness survival under zero noise.
std::vector<CheckResult> funnel_suite(std::uint64_t base_seed, std::size_t runs);

// Panel construction against a brute-force subset oracle, greedy soundness,
// deterministic tie-breaks, incumbent update semantics.
std::vector<CheckResult> panel_suite(std::uint64_t base_seed, std::size_t runs);

// Empirical region-hitting frequency against the analytic lower bound.
std::vector<CheckResult> hitting_suite(std::uint64_t base_seed,
                                       std::size_t runs);

// Dispatch by name: theorems, funnel, panel, hitting. Throws config_error
// for anything else.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t base_seed, std::size_t runs);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace reuse::verify
