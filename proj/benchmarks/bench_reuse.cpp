#include <benchmark/benchmark.h>

#include "reuse/engine.hpp"
#include "reuse/evaluators.hpp"
#include "reuse/funnel.hpp"
#include "reuse/generator.hpp"
#include "reuse/panel.hpp"

using namespace reuse;

namespace {

std::vector<Candidate> make_pool(const TaskContext& ctx, std::size_t latents,
                                 std::size_t k, std::uint64_t seed) {
  IdSource ids;
  auto zs = sample_prior(ctx.prior, derive_seed(seed, Stream::prior_init),
                         latents, ids);
  std::vector<Candidate> pool;
  for (const auto& z : zs) {
    auto fam = decode_family(z, ctx, k,
                             derive_seed(seed, Stream::pool_decode, z.id), ids);
    pool.insert(pool.end(), fam.begin(), fam.end());
  }
  return pool;
}

void BM_DecodeFamily(benchmark::State& state) {
  TaskContext ctx = default_task(7);
  IdSource ids;
  auto zs = sample_prior(ctx.prior, 11, 1, ids);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto fam = decode_family_at(zs[0], ctx, 16, seed++, 0);
    benchmark::DoNotOptimize(fam);
  }
}
BENCHMARK(BM_DecodeFamily);

void BM_StageSelection(benchmark::State& state) {
  SearchConfig cfg = default_config();
  TaskContext ctx = default_task(7);
  auto pool = make_pool(ctx, 16, 4, 7);
  for (auto _ : state) {
    StagePool p0;
    p0.members = pool;
    CostLedger ledger;
    auto pools = run_funnel(p0, cfg, ctx, 7, ledger);
    benchmark::DoNotOptimize(pools);
  }
}
BENCHMARK(BM_StageSelection);

void BM_ExactPanel(benchmark::State& state) {
  SearchConfig cfg = default_config();
  TaskContext ctx = default_task(7);
  auto pool = make_pool(ctx, 5, 4, 7);
  const EvaluatorStage& final_stage = cfg.funnel.back();
  for (auto& m : pool) {
    affinity(m, Target::a, final_stage, ctx, 7);
    affinity(m, Target::b, final_stage, ctx, 7);
  }
  for (auto _ : state) {
    Panel p = build_panel(pool, cfg, ctx);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_ExactPanel);

void BM_FullRun(benchmark::State& state) {
  SearchConfig cfg = default_config();
  cfg.seed = 7;
  TaskContext ctx = default_task(cfg.seed);
  for (auto _ : state) {
    RunResult r = run_search(ctx, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_FullRun);

}  // namespace

BENCHMARK_MAIN();
