#pragma once

#include <cstdint>
#include <vector>

#include "reuse/types.hpp"

namespace reuse {

enum class InfeasibilityReason : int {
  invalid_molecule = 0,
  qed_below_floor = 1,
  sa_below_floor = 2,
  missing_affinity = 3,
  parent_deviation_exceeded = 4,
};

const char* infeasibility_reason_name(InfeasibilityReason r);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<InfeasibilityReason> reasons;
};

// Simulated affinity measurement at one fidelity: the true landscape value at
// the candidate's decoded latent plus N(0, stage.noise_sigma^2). The noise
// stream is keyed by the latent's content, the target and the stage, so the
// same call always returns the same value. Stores the result in m's per-stage
// affinity map and returns it.
double affinity(Candidate& m, Target target, const EvaluatorStage& stage,
                const TaskContext& ctx, std::uint64_t rng_seed);

// (qed_like + sa_like) / 2.
double chemistry_score(const Candidate& m);

// Hard feasibility at a stage: validity, chemistry floors, presence of the
// stage's affinities, and (when a parent is given) bounded structural
// deviation from it. Reports every violated reason.
FeasibilityReport feasibility(const Candidate& m, const SearchConfig& cfg,
                              int stage_index, const Candidate* parent = nullptr);

// Min Tanimoto similarity a candidate may keep to its parent before the
// parent_deviation_exceeded reason fires.
inline constexpr double kParentMinSimilarity = 0.3;

// 1 - |x & y| / |x | y|; two empty fingerprints are at distance 0.
double tanimoto_distance(const Fingerprint& x, const Fingerprint& y);
double tanimoto_distance(const Candidate& x, const Candidate& y);

}  // namespace reuse
