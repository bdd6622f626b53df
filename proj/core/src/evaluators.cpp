#include "reuse/evaluators.hpp"

#include <bit>

#include "reuse/generator.hpp"
#include "reuse/rng.hpp"

namespace reuse {

const char* infeasibility_reason_name(InfeasibilityReason r) {
  switch (r) {
    case InfeasibilityReason::invalid_molecule: return "invalid_molecule";
    case InfeasibilityReason::qed_below_floor: return "qed_below_floor";
    case InfeasibilityReason::sa_below_floor: return "sa_below_floor";
    case InfeasibilityReason::missing_affinity: return "missing_affinity";
    case InfeasibilityReason::parent_deviation_exceeded:
      return "parent_deviation_exceeded";
  }
  return "unknown";
}

double affinity(Candidate& m, Target target, const EvaluatorStage& stage,
                const TaskContext& ctx, std::uint64_t rng_seed) {
  if (stage.stage_index < 1)
    throw input_error("affinity: stage_index must be >= 1");
  const LandscapeSpec& spec =
      target == Target::a ? ctx.landscape_a : ctx.landscape_b;
  double value = landscape_value(spec, m.latent);
  if (stage.noise_sigma > 0.0) {
    Rng rng = derive_rng(rng_seed, Stream::stage_noise, hash_coords(m.latent),
                         static_cast<std::uint64_t>(target),
                         static_cast<std::uint64_t>(stage.stage_index));
    value += stage.noise_sigma * rng.gaussian();
  }
  m.ensure_stage_slots(static_cast<std::size_t>(stage.stage_index));
  m.affinity[stage.stage_index - 1].set(target, value);
  return value;
}

double chemistry_score(const Candidate& m) {
  return 0.5 * (m.qed_like + m.sa_like);
}

FeasibilityReport feasibility(const Candidate& m, const SearchConfig& cfg,
                              int stage_index, const Candidate* parent) {
  if (stage_index < 1) throw input_error("feasibility: stage_index must be >= 1");
  FeasibilityReport report;
  auto flag = [&report](InfeasibilityReason r) {
    report.feasible = false;
    report.reasons.push_back(r);
  };
  if (!m.valid) flag(InfeasibilityReason::invalid_molecule);
  if (m.qed_like < cfg.qed_floor) flag(InfeasibilityReason::qed_below_floor);
  if (m.sa_like < cfg.sa_floor) flag(InfeasibilityReason::sa_below_floor);
  if (!m.has_affinity(stage_index, Target::a) ||
      !m.has_affinity(stage_index, Target::b))
    flag(InfeasibilityReason::missing_affinity);
  if (parent != nullptr) {
    double similarity = 1.0 - tanimoto_distance(*parent, m);
    if (similarity < kParentMinSimilarity)
      flag(InfeasibilityReason::parent_deviation_exceeded);
  }
  return report;
}

double tanimoto_distance(const Fingerprint& x, const Fingerprint& y) {
  int uni = std::popcount(x.bits | y.bits);
  if (uni == 0) return 0.0;
  int inter = std::popcount(x.bits & y.bits);
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double tanimoto_distance(const Candidate& x, const Candidate& y) {
  return tanimoto_distance(x.features, y.features);
}

}  // namespace reuse
