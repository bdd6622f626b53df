#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reuse/scoring.hpp"
#include "reuse/types.hpp"

namespace reuse {

// Candidate pool entering or leaving one funnel stage. stage_index 0 is the
// raw pooled offspring set. Members are kept in ascending id order.
struct StagePool {
  int stage_index = 0;
  std::vector<Candidate> members;
  std::optional<std::size_t> budget;  // none for stage 0
};

struct CostLedger {
  double total = 0.0;
  std::vector<double> per_stage;  // slot s-1 accumulates stage-s charges

  void charge(int stage_index, double amount);
};

// Union of decoded families, id-ordered. Content-identical candidates with
// distinct ids are all retained.
StagePool pool_offspring(std::span<const std::vector<Candidate>> families);

// One nested selection step: measure stage affinities for every member
// (charging cost_units per member), score with the stage's weights, keep the
// top min(|pool|, budget) under the feasibility-first order. If out_scores is
// given it receives the scores of the full incoming pool.
StagePool run_stage(const StagePool& pool, const EvaluatorStage& stage,
                    std::size_t budget, const SearchConfig& cfg,
                    const TaskContext& ctx, std::uint64_t rng_seed,
                    CostLedger& ledger, std::size_t workers = 1,
                    std::vector<ScoredCandidate>* out_scores = nullptr);

// Applies every configured stage in order. Returns pools for stages 0..S;
// element 0 is the input pool. out_stage_scores, when given, receives for
// each stage the scores of that stage's full incoming pool, index-aligned
// with the incoming pool's members.
std::vector<StagePool> run_funnel(
    StagePool pool0, const SearchConfig& cfg, const TaskContext& ctx,
    std::uint64_t rng_seed, CostLedger& ledger, std::size_t workers = 1,
    std::vector<std::vector<ScoredCandidate>>* out_stage_scores = nullptr);

}  // namespace reuse
