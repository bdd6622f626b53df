#include "reuse/funnel.hpp"

#include <algorithm>

#include "reuse/evaluators.hpp"
#include "reuse/parallel.hpp"
#include "reuse/rng.hpp"

namespace reuse {

void CostLedger::charge(int stage_index, double amount) {
  if (stage_index < 1) throw input_error("CostLedger: stage_index must be >= 1");
  if (per_stage.size() < static_cast<std::size_t>(stage_index))
    per_stage.resize(stage_index, 0.0);
  per_stage[stage_index - 1] += amount;
  total += amount;
}

StagePool pool_offspring(std::span<const std::vector<Candidate>> families) {
  StagePool pool;
  pool.stage_index = 0;
  std::size_t total = 0;
  for (const auto& fam : families) total += fam.size();
  pool.members.reserve(total);
  for (const auto& fam : families)
    pool.members.insert(pool.members.end(), fam.begin(), fam.end());
  std::sort(pool.members.begin(), pool.members.end(),
            [](const Candidate& x, const Candidate& y) { return x.id < y.id; });
  return pool;
}

StagePool run_stage(const StagePool& pool, const EvaluatorStage& stage,
                    std::size_t budget, const SearchConfig& cfg,
                    const TaskContext& ctx, std::uint64_t rng_seed,
                    CostLedger& ledger, std::size_t workers,
                    std::vector<ScoredCandidate>* out_scores) {
  if (budget < 1) throw config_error("run_stage: budget must be >= 1");

  StagePool next;
  next.stage_index = stage.stage_index;
  next.budget = budget;
  if (pool.members.empty()) {
    if (out_scores) out_scores->clear();
    return next;
  }

  // Measure this stage's affinities for the whole incoming pool.
  std::vector<Candidate> measured = pool.members;
  parallel_for(measured.size(), workers, [&](std::size_t i) {
    affinity(measured[i], Target::a, stage, ctx, rng_seed);
    affinity(measured[i], Target::b, stage, ctx, rng_seed);
  });
  ledger.charge(stage.stage_index,
                stage.cost_units * static_cast<double>(measured.size()));

  std::vector<ScoredCandidate> scored(measured.size());
  parallel_for(measured.size(), workers, [&](std::size_t i) {
    scored[i] = stage_score(measured[i], measured, stage.stage_index, cfg, ctx);
  });

  std::vector<std::size_t> order(measured.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return lex_precedes(scored[x].key(), scored[y].key());
  });

  std::size_t keep = std::min(budget, measured.size());
  next.members.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r)
    next.members.push_back(measured[order[r]]);
  std::sort(next.members.begin(), next.members.end(),
            [](const Candidate& x, const Candidate& y) { return x.id < y.id; });

  if (out_scores) *out_scores = std::move(scored);
  return next;
}

std::vector<StagePool> run_funnel(
    StagePool pool0, const SearchConfig& cfg, const TaskContext& ctx,
    std::uint64_t rng_seed, CostLedger& ledger, std::size_t workers,
    std::vector<std::vector<ScoredCandidate>>* out_stage_scores) {
  if (cfg.funnel.size() != cfg.stage_budgets.size())
    throw config_error("run_funnel: funnel and stage_budgets sizes differ");
  std::vector<StagePool> pools;
  pools.reserve(cfg.funnel.size() + 1);
  pool0.stage_index = 0;
  pool0.budget.reset();
  pools.push_back(std::move(pool0));
  if (out_stage_scores) out_stage_scores->assign(cfg.funnel.size(), {});
  for (std::size_t s = 0; s < cfg.funnel.size(); ++s) {
    auto* scores = out_stage_scores ? &(*out_stage_scores)[s] : nullptr;
    pools.push_back(run_stage(pools.back(), cfg.funnel[s], cfg.stage_budgets[s],
                              cfg, ctx, rng_seed, ledger, workers, scores));
  }
  return pools;
}

}  // namespace reuse
