#include "reuse/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "reuse/evaluators.hpp"
#include "reuse/generator.hpp"
#include "reuse/rng.hpp"

namespace reuse {

double balance_affinity(double aff_a, double aff_b, const TaskContext& ctx) {
  return ctx.w_a * aff_a + ctx.w_b * aff_b -
         ctx.lambda_bal * std::abs(aff_a - aff_b);
}

double diversity_term(const Candidate& m, std::span<const Candidate> pool) {
  double best = 1.0;
  bool found_other = false;
  for (const Candidate& other : pool) {
    if (other.id == m.id) continue;
    found_other = true;
    best = std::min(best, tanimoto_distance(m, other));
    if (best == 0.0) break;
  }
  return found_other ? best : 0.0;
}

ScoredCandidate stage_score(const Candidate& m, std::span<const Candidate> pool,
                            int stage_index, const SearchConfig& cfg,
                            const TaskContext& ctx) {
  ScoredCandidate out;
  out.candidate_id = m.id;

  FeasibilityReport report = feasibility(m, cfg, stage_index);
  out.feasible = report.feasible;

  bool is_final = stage_index == static_cast<int>(cfg.final_stage());
  double beta_chem = is_final ? cfg.beta_chem_rerank : cfg.beta_chem_search;

  out.components.chem_term = beta_chem * chemistry_score(m);
  out.components.div_term = cfg.beta_div_subset * diversity_term(m, pool);
  if (m.has_affinity(stage_index, Target::a) &&
      m.has_affinity(stage_index, Target::b)) {
    out.aff_a = m.affinity_at(stage_index, Target::a);
    out.aff_b = m.affinity_at(stage_index, Target::b);
    out.components.f_aff = balance_affinity(out.aff_a, out.aff_b, ctx);
    out.h = out.components.f_aff + out.components.chem_term +
            out.components.div_term;
  } else {
    // Missing measurements leave nothing to rank on.
    out.components.f_aff = kNegInf;
    out.h = kNegInf;
  }
  return out;
}

double top_l_mean(std::vector<ScoredCandidate> scored, std::size_t L) {
  if (scored.empty() || L == 0) return kNegInf;
  std::sort(scored.begin(), scored.end(),
            [](const ScoredCandidate& x, const ScoredCandidate& y) {
              return lex_precedes(x.key(), y.key());
            });
  std::size_t take = std::min(L, scored.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += scored[i].h;
  return sum / static_cast<double>(take);
}

FamilyUtility family_utility_detail(const LatentPoint& z, const TaskContext& ctx,
                                    const SearchConfig& cfg,
                                    std::uint64_t rng_seed) {
  if (cfg.funnel.empty())
    throw config_error("family_utility: config has no funnel stages");
  // Ids are local to this call; they only break ties inside the family.
  std::vector<Candidate> family = decode_family_at(
      z, ctx, cfg.M_eval, derive_seed(rng_seed, Stream::fitness_eval), 0);

  const EvaluatorStage& stage1 = cfg.funnel.front();
  std::uint64_t stage_seed = derive_seed(rng_seed, Stream::stage_noise);
  FamilyUtility result;
  for (Candidate& m : family) {
    affinity(m, Target::a, stage1, ctx, stage_seed);
    affinity(m, Target::b, stage1, ctx, stage_seed);
    if (m.qed_like >= cfg.qed_floor && m.sa_like >= cfg.sa_floor)
      result.chem_feasible_seen = true;
  }
  std::vector<ScoredCandidate> scored;
  scored.reserve(family.size());
  for (const Candidate& m : family)
    scored.push_back(stage_score(m, family, 1, cfg, ctx));
  result.value = top_l_mean(std::move(scored), cfg.L);
  return result;
}

double family_utility(const LatentPoint& z, const TaskContext& ctx,
                      const SearchConfig& cfg, std::uint64_t rng_seed) {
  return family_utility_detail(z, ctx, cfg, rng_seed).value;
}

double panel_diversity(std::span<const Candidate> panel) {
  std::size_t n = panel.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sum += tanimoto_distance(panel[i], panel[j]);
  // Ordered-pair normalization; the factor 2 counts each unordered pair twice.
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double panel_utility(std::span<const Candidate> panel, const SearchConfig& cfg,
                     const TaskContext& ctx) {
  if (panel.empty()) return kNegInf;
  int final_stage = static_cast<int>(cfg.final_stage());
  double quality_sum = 0.0;
  double gap_sum = 0.0;
  for (const Candidate& m : panel) {
    if (!m.has_affinity(final_stage, Target::a) ||
        !m.has_affinity(final_stage, Target::b))
      return kNegInf;
    double aff_a = m.affinity_at(final_stage, Target::a);
    double aff_b = m.affinity_at(final_stage, Target::b);
    quality_sum += cfg.eta_aff * balance_affinity(aff_a, aff_b, ctx) +
                   cfg.eta_chem * chemistry_score(m);
    gap_sum += std::abs(aff_a - aff_b);
  }
  double n = static_cast<double>(panel.size());
  return quality_sum / n + cfg.eta_div * panel_diversity(panel) -
         cfg.beta_bal_subset * gap_sum / n;
}

}  // namespace reuse
