#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reuse/types.hpp"

namespace reuse {

struct ScoreComponents {
  double f_aff = kNegInf;
  double chem_term = 0.0;
  double div_term = 0.0;
};

struct ScoredCandidate {
  CandidateId candidate_id = 0;
  bool feasible = false;
  double h = kNegInf;
  ScoreComponents components;
  // Raw stage measurements the score was built from, for reporting.
  double aff_a = kNegInf;
  double aff_b = kNegInf;

  LexKey key() const { return {feasible, h, candidate_id}; }
};

// w_a * A_a + w_b * A_b - lambda_bal * |A_a - A_b|.
double balance_affinity(double aff_a, double aff_b, const TaskContext& ctx);

// Min Tanimoto distance from m to any other pool member; 0 when m is alone.
// m is identified inside pool by id.
double diversity_term(const Candidate& m, std::span<const Candidate> pool);

// h_s = f_aff + beta_chem * q_chem + beta_div * q_div. beta_chem switches
// from the search weight to the rerank weight at the final stage. Missing
// stage affinities yield h = -inf and an infeasible flag.
ScoredCandidate stage_score(const Candidate& m, std::span<const Candidate> pool,
                            int stage_index, const SearchConfig& cfg,
                            const TaskContext& ctx);

// Mean h of the top-L entries under the feasibility-first order. L is capped
// at the list size.
double top_l_mean(std::vector<ScoredCandidate> scored, std::size_t L);

struct FamilyUtility {
  double value = kNegInf;
  // True when some family member clears both chemistry floors; feeds the
  // budget-sweep recovery statistic.
  bool chem_feasible_seen = false;
};

// Family-level utility of a latent: decode M_eval candidates, score them at
// stage 1 against the family itself, average the top-L h values.
FamilyUtility family_utility_detail(const LatentPoint& z, const TaskContext& ctx,
                                    const SearchConfig& cfg,
                                    std::uint64_t rng_seed);
double family_utility(const LatentPoint& z, const TaskContext& ctx,
                      const SearchConfig& cfg, std::uint64_t rng_seed);

// Mean pairwise Tanimoto distance over ordered pairs; 0 for |S| < 2.
double panel_diversity(std::span<const Candidate> panel);

// Panel objective: mean per-member quality + eta_div * diversity
// - beta_bal_subset * mean final-stage affinity gap. Empty panels score -inf.
// Member quality uses final-stage affinities; a member missing them
// contributes -inf.
double panel_utility(std::span<const Candidate> panel, const SearchConfig& cfg,
                     const TaskContext& ctx);

}  // namespace reuse
