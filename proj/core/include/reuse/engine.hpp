#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reuse/rng.hpp"
#include "reuse/trace.hpp"
#include "reuse/types.hpp"

namespace reuse {

struct Population {
  std::vector<PopulationMember> members;
  std::uint32_t generation = 0;
};

// Top B_par members by cached fitness, ties to the lower latent id.
std::vector<LatentPoint> select_parents(const Population& pop,
                                        const SearchConfig& cfg);

// z + sigma_t * eps with sigma_t = sigma_mut * gamma_mut^generation.
LatentPoint mutate(const LatentPoint& z, std::uint32_t generation,
                   const SearchConfig& cfg, std::uint64_t rng_seed,
                   IdSource& ids);

// Convex combination lambda * z_i + (1 - lambda) * z_j, lambda ~ U(0, 1).
LatentPoint crossover(const LatentPoint& z_i, const LatentPoint& z_j,
                      std::uint64_t rng_seed, IdSource& ids);

// B_off proposals from the mutation / crossover / immigration mixture.
// A single parent folds crossover mass into mutation.
std::vector<LatentPoint> spawn_offspring(std::span<const LatentPoint> parents,
                                         std::uint32_t generation,
                                         const TaskContext& ctx,
                                         const SearchConfig& cfg,
                                         std::uint64_t rng_seed, IdSource& ids);

// Elitist update: top B of current members plus offspring, by fitness with
// id tie-break; generation advances by one.
Population update_population(const Population& pop,
                             std::span<const PopulationMember> offspring,
                             const SearchConfig& cfg);

struct RunOptions {
  std::size_t workers = 1;
  // When false, skips family pooling, the funnel and panel construction.
  // Offspring latents and fitness values are identical to a full run with
  // the same seed; used by sampling experiments.
  bool decode_pools = true;
  // When false, disables parent selection, mutation, crossover and the
  // elitist update; every iteration draws B_off fresh prior samples instead.
  // The downstream funnel and panel stages are unchanged.
  bool search_enabled = true;
};

RunResult run_search(const TaskContext& ctx, const SearchConfig& cfg,
                     const RunOptions& opts = {});

}  // namespace reuse
