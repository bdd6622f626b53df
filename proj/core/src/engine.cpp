#include "reuse/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "reuse/funnel.hpp"
#include "reuse/generator.hpp"
#include "reuse/parallel.hpp"
#include "reuse/scoring.hpp"

namespace reuse {

namespace {

bool fitness_precedes(const PopulationMember& x, const PopulationMember& y) {
  double fx = std::isnan(x.fitness) ? kNegInf : x.fitness;
  double fy = std::isnan(y.fitness) ? kNegInf : y.fitness;
  if (fx != fy) return fx > fy;
  return x.latent.id < y.latent.id;
}

void check_task(const TaskContext& ctx, const SearchConfig& cfg) {
  if (ctx.landscape_a.center.size() != cfg.d_z ||
      ctx.landscape_b.center.size() != cfg.d_z)
    throw config_error("run_search: landscape dimension does not match d_z");
  if (ctx.prior.mode == PriorMode::gaussian && ctx.prior.dim != cfg.d_z)
    throw config_error("run_search: prior dimension does not match d_z");
  if (ctx.chem_qed_axis.size() != cfg.d_z || ctx.chem_sa_axis.size() != cfg.d_z)
    throw config_error("run_search: chemistry axes do not match d_z");
}

}  // namespace

std::vector<LatentPoint> select_parents(const Population& pop,
                                        const SearchConfig& cfg) {
  if (pop.members.size() < cfg.B_par)
    throw config_error("select_parents: population smaller than B_par");
  std::vector<const PopulationMember*> order;
  order.reserve(pop.members.size());
  for (const auto& m : pop.members) order.push_back(&m);
  std::sort(order.begin(), order.end(),
            [](const PopulationMember* x, const PopulationMember* y) {
              return fitness_precedes(*x, *y);
            });
  std::vector<LatentPoint> parents;
  parents.reserve(cfg.B_par);
  for (std::size_t i = 0; i < cfg.B_par; ++i)
    parents.push_back(order[i]->latent);
  return parents;
}

LatentPoint mutate(const LatentPoint& z, std::uint32_t generation,
                   const SearchConfig& cfg, std::uint64_t rng_seed,
                   IdSource& ids) {
  Rng rng = derive_rng(rng_seed, Stream::mutation);
  double sigma_t =
      cfg.sigma_mut * std::pow(cfg.gamma_mut, static_cast<double>(generation));
  LatentPoint child;
  child.coords.resize(z.coords.size());
  for (std::size_t i = 0; i < z.coords.size(); ++i)
    child.coords[i] = z.coords[i] + sigma_t * rng.gaussian();
  child.id = ids.reserve_latents(1);
  child.birth_iteration = generation + 1;
  child.origin = OriginOp::mutation;
  return child;
}

LatentPoint crossover(const LatentPoint& z_i, const LatentPoint& z_j,
                      std::uint64_t rng_seed, IdSource& ids) {
  if (z_i.coords.size() != z_j.coords.size())
    throw input_error("crossover: parent dimensions differ");
  Rng rng = derive_rng(rng_seed, Stream::crossover);
  double lambda = rng.uniform();
  LatentPoint child;
  child.coords.resize(z_i.coords.size());
  for (std::size_t i = 0; i < child.coords.size(); ++i)
    child.coords[i] = lambda * z_i.coords[i] + (1.0 - lambda) * z_j.coords[i];
  child.id = ids.reserve_latents(1);
  child.birth_iteration =
      std::max(z_i.birth_iteration, z_j.birth_iteration) + 1;
  child.origin = OriginOp::crossover;
  return child;
}

std::vector<LatentPoint> spawn_offspring(std::span<const LatentPoint> parents,
                                         std::uint32_t generation,
                                         const TaskContext& ctx,
                                         const SearchConfig& cfg,
                                         std::uint64_t rng_seed, IdSource& ids) {
  if (parents.empty() && cfg.alpha_imm < 1.0)
    throw input_error("spawn_offspring: no parents for a non-immigration mixture");

  // With one parent, crossover mass folds into mutation.
  double p_mut = cfg.alpha_mut;
  double p_cross = cfg.alpha_cross;
  if (parents.size() < 2) {
    p_mut += p_cross;
    p_cross = 0.0;
  }

  std::vector<LatentPoint> offspring;
  offspring.reserve(cfg.B_off);
  for (std::size_t slot = 0; slot < cfg.B_off; ++slot) {
    std::uint64_t slot_seed = derive_seed(rng_seed, Stream::offspring, slot);
    Rng choice = derive_rng(slot_seed, Stream::operator_choice);
    double u = choice.uniform();
    LatentPoint child;
    if (u < p_mut) {
      const LatentPoint& parent = parents[choice.uniform_below(parents.size())];
      child = mutate(parent, generation, cfg, slot_seed, ids);
    } else if (u < p_mut + p_cross) {
      std::size_t i = choice.uniform_below(parents.size());
      std::size_t j = choice.uniform_below(parents.size() - 1);
      if (j >= i) ++j;
      child = crossover(parents[i], parents[j], slot_seed, ids);
    } else {
      child = sample_prior(ctx.prior, derive_seed(slot_seed, Stream::immigration),
                           1, ids)
                  .front();
      child.origin = OriginOp::immigration;
    }
    child.birth_iteration = generation + 1;
    offspring.push_back(std::move(child));
  }
  return offspring;
}

Population update_population(const Population& pop,
                             std::span<const PopulationMember> offspring,
                             const SearchConfig& cfg) {
  Population next;
  next.generation = pop.generation + 1;
  std::vector<PopulationMember> combined(pop.members.begin(), pop.members.end());
  combined.insert(combined.end(), offspring.begin(), offspring.end());
  std::sort(combined.begin(), combined.end(), fitness_precedes);
  std::size_t keep = std::min<std::size_t>(cfg.B, combined.size());
  next.members.assign(combined.begin(), combined.begin() + keep);
  return next;
}

RunResult run_search(const TaskContext& ctx, const SearchConfig& cfg,
                     const RunOptions& opts) {
  validate(cfg);
  check_task(ctx, cfg);
  auto t_begin = std::chrono::steady_clock::now();

  const std::uint64_t seed = cfg.seed;
  const std::size_t workers = std::max<std::size_t>(1, opts.workers);
  IdSource ids;

  auto eval_fitness = [&](std::span<const LatentPoint> latents)
      -> std::vector<FamilyUtility> {
    std::vector<FamilyUtility> out(latents.size());
    parallel_for(latents.size(), workers, [&](std::size_t i) {
      out[i] = family_utility_detail(
          latents[i], ctx, cfg,
          derive_seed(seed, Stream::fitness_eval, latents[i].id));
    });
    return out;
  };

  Population pop;
  {
    std::vector<LatentPoint> init = sample_prior(
        ctx.prior, derive_seed(seed, Stream::prior_init), cfg.B, ids);
    std::vector<FamilyUtility> fit = eval_fitness(init);
    pop.members.reserve(cfg.B);
    for (std::size_t i = 0; i < init.size(); ++i)
      pop.members.push_back({std::move(init[i]), fit[i].value});
  }

  RunResult result;
  result.config = cfg;
  result.task = ctx;
  result.seed = seed;

  Panel incumbent;
  CostLedger ledger;

  for (std::uint32_t t = 1; t <= cfg.T; ++t) {
    std::vector<LatentPoint> off;
    if (opts.search_enabled) {
      std::vector<LatentPoint> parents = select_parents(pop, cfg);
      off = spawn_offspring(parents, pop.generation, ctx, cfg,
                            derive_seed(seed, Stream::offspring, t), ids);
    } else {
      off = sample_prior(ctx.prior, derive_seed(seed, Stream::offspring, t),
                         cfg.B_off, ids);
      for (auto& z : off) z.birth_iteration = t;
    }
    std::vector<FamilyUtility> fit = eval_fitness(off);

    TraceRecord rec;
    rec.iteration = t;
    rec.offspring.reserve(off.size());
    for (std::size_t i = 0; i < off.size(); ++i)
      rec.offspring.push_back({off[i].id, off[i].origin, fit[i].value,
                               fit[i].chem_feasible_seen, off[i].coords});

    if (opts.decode_pools) {
      // Reserve id blocks first so parallel decode cannot reorder ids.
      std::vector<CandidateId> bases(off.size());
      for (std::size_t i = 0; i < off.size(); ++i)
        bases[i] = ids.reserve_candidates(cfg.family_size);
      std::vector<std::vector<Candidate>> families(off.size());
      parallel_for(off.size(), workers, [&](std::size_t i) {
        families[i] = decode_family_at(
            off[i], ctx, cfg.family_size,
            derive_seed(seed, Stream::pool_decode, off[i].id), bases[i]);
      });

      CostLedger iter_ledger;
      std::vector<std::vector<ScoredCandidate>> stage_scores;
      std::vector<StagePool> pools =
          run_funnel(pool_offspring(families), cfg, ctx,
                     derive_seed(seed, Stream::funnel, t), iter_ledger, workers,
                     &stage_scores);

      Panel panel = build_panel(pools.back().members, cfg, ctx,
                                static_cast<int>(t));
      incumbent = update_incumbent(incumbent, panel);

      for (const StagePool& p : pools) rec.pool_sizes.push_back(p.members.size());
      for (std::size_t s = 1; s < pools.size(); ++s) {
        std::vector<CandidateId> ids_s;
        ids_s.reserve(pools[s].members.size());
        for (const Candidate& m : pools[s].members) ids_s.push_back(m.id);
        rec.survivor_ids.push_back(std::move(ids_s));
      }
      rec.stage_cost = iter_ledger.per_stage;
      rec.charged_cost = iter_ledger.total;
      for (int s = 1; s <= static_cast<int>(iter_ledger.per_stage.size()); ++s)
        ledger.charge(s, iter_ledger.per_stage[s - 1]);

      // Stage-0 snapshot plus per-stage measurements for each candidate.
      std::unordered_map<CandidateId, std::size_t> slot;
      rec.candidates.reserve(pools[0].members.size());
      for (const Candidate& m : pools[0].members) {
        slot[m.id] = rec.candidates.size();
        rec.candidates.push_back({m.id, m.origin_latent, m.valid, m.qed_like,
                                  m.sa_like, m.features.bits, m.latent, {}});
      }
      for (std::size_t s = 0; s < stage_scores.size(); ++s) {
        const std::vector<Candidate>& incoming = pools[s].members;
        for (std::size_t i = 0; i < stage_scores[s].size(); ++i) {
          const ScoredCandidate& sc = stage_scores[s][i];
          StageTraceEntry entry{static_cast<int>(s) + 1, sc.aff_a, sc.aff_b,
                                sc.h, sc.feasible};
          rec.candidates[slot.at(incoming[i].id)].stages.push_back(entry);
        }
      }

      if (!panel.empty()) {
        rec.panel_utility = panel.utility;
        for (const Candidate& m : panel.members) rec.panel_ids.push_back(m.id);
      }
    }

    if (opts.search_enabled) {
      std::vector<PopulationMember> off_members;
      off_members.reserve(off.size());
      for (std::size_t i = 0; i < off.size(); ++i)
        off_members.push_back({std::move(off[i]), fit[i].value});
      pop = update_population(pop, off_members, cfg);
    } else {
      pop.generation += 1;
    }

    if (!incumbent.empty()) rec.incumbent_utility = incumbent.utility;
    for (const auto& m : pop.members) rec.population_ids.push_back(m.latent.id);
    rec.best_fitness = kNegInf;
    for (const auto& m : pop.members)
      rec.best_fitness = std::max(rec.best_fitness, m.fitness);
    result.trace.push_back(std::move(rec));
  }

  result.incumbent = std::move(incumbent);
  result.total_cost = ledger.total;
  result.final_population = pop.members;
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t_begin)
                            .count();
  return result;
}

}  // namespace reuse
