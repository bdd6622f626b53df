#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reuse {

using LatentId = std::uint64_t;
using CandidateId = std::uint64_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Target : int { a = 0, b = 1 };

enum class OriginOp : int { prior_init = 0, mutation = 1, crossover = 2, immigration = 3 };

const char* origin_op_name(OriginOp op);

// A point in the generator's input noise space.
struct LatentPoint {
  std::vector<double> coords;
  LatentId id = 0;
  std::uint32_t birth_iteration = 0;
  OriginOp origin = OriginOp::prior_init;
};

// 64-bit structural fingerprint of a decoded candidate.
struct Fingerprint {
  std::uint64_t bits = 0;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

// Affinity pair for one evaluation stage. NaN means "not yet evaluated".
struct DualAffinity {
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();

  double get(Target t) const { return t == Target::a ? a : b; }
  void set(Target t, double v) { (t == Target::a ? a : b) = v; }
  bool has(Target t) const { return std::isfinite(get(t)); }
};

// One decoded sample from a latent point's family.
struct Candidate {
  Fingerprint features;
  std::vector<DualAffinity> affinity;  // slot s-1 holds stage-s values
  double qed_like = 0.0;
  double sa_like = 0.0;
  bool valid = true;
  std::vector<double> latent;  // decoded position in noise space
  LatentId origin_latent = 0;
  CandidateId id = 0;

  bool has_affinity(int stage_index, Target t) const {
    return stage_index >= 1 &&
           static_cast<std::size_t>(stage_index) <= affinity.size() &&
           affinity[stage_index - 1].has(t);
  }
  double affinity_at(int stage_index, Target t) const {
    return affinity[stage_index - 1].get(t);
  }
  void ensure_stage_slots(std::size_t stages) {
    if (affinity.size() < stages) affinity.resize(stages);
  }
};

enum class LandscapeKind : int { quadratic_bowl = 0, multi_basin = 1 };

// Synthetic stand-in for a docking affinity surface over the noise space.
// noise_sigma is the decode draw spread: candidates decoded from z sit at
// z plus a Gaussian perturbation of this scale (averaged across the pair).
struct LandscapeSpec {
  std::vector<double> center;
  double scale = 1.0;
  double noise_sigma = 0.0;
  LandscapeKind kind = LandscapeKind::quadratic_bowl;
};

enum class PriorMode : int { gaussian = 0, anchor_mixture = 1 };

struct PriorSpec {
  PriorMode mode = PriorMode::gaussian;
  std::vector<std::vector<double>> anchors;  // used by anchor_mixture
  double sigma = 1.0;
  std::size_t dim = 10;
};

// Frozen description of one target pair: the two affinity landscapes, the
// pair-aware initialization prior, and the balance weighting.
struct TaskContext {
  std::string pair_id;
  LandscapeSpec landscape_a;
  LandscapeSpec landscape_b;
  PriorSpec prior;
  double w_a = 1.0;
  double w_b = 1.0;
  double lambda_bal = 0.25;
  double invalid_prob = 0.02;
  // Unit directions defining qed_like / sa_like; drawn once from the run seed.
  std::vector<double> chem_qed_axis;
  std::vector<double> chem_sa_axis;
};

// One evaluation fidelity in the funnel. Stage indices are 1-based; the
// final stage is the highest fidelity.
struct EvaluatorStage {
  int stage_index = 1;
  double noise_sigma = 0.0;  // sd of proxy noise added to the true landscape value
  double cost_units = 1.0;   // simulated seconds per molecule
};

struct SearchConfig {
  // population search
  std::size_t B = 4;       // population size
  std::size_t B_par = 3;   // parents per iteration
  std::size_t B_off = 4;   // offspring per iteration
  std::size_t T = 3;       // iterations
  std::size_t d_z = 10;    // noise-space dimension
  double alpha_mut = 0.40;
  double alpha_cross = 0.35;
  double alpha_imm = 0.25;  // = n_imm / B_off
  double sigma_mut = 0.42;
  double gamma_mut = 0.82;
  std::size_t n_imm = 1;
  std::size_t M_eval = 2;       // decodes per latent when scoring fitness
  std::size_t L = 2;            // top-L family members averaged by the utility
  std::size_t family_size = 24; // decodes per offspring when pooling

  // funnel
  std::vector<std::size_t> stage_budgets = {40, 20};
  std::vector<EvaluatorStage> funnel;  // per-stage noise and cost

  // panel
  std::size_t N = 10;  // panel size
  double tau = 0.15;   // min pairwise distance, 1 - rho_max

  // feasibility and scoring weights
  double qed_floor = 0.50;
  double sa_floor = 0.50;
  double beta_chem_search = 0.40;
  double beta_chem_rerank = 0.60;
  double beta_div_subset = 0.05;
  double beta_bal_subset = 0.02;
  double lambda_bal_proxy = 0.25;
  double eta_aff = 1.0;
  double eta_chem = 0.60;
  double eta_div = 0.05;

  // recorded for fidelity with the upstream generator setup; unused here
  std::size_t t_train = 1000;
  std::size_t t_infer = 100;

  std::uint64_t seed = 0;

  std::size_t final_stage() const { return stage_budgets.size(); }
};

// Default configuration. Derived entries: alpha_imm = n_imm / B_off,
// alpha_mut = 1 - alpha_cross - alpha_imm, tau = 1 - 0.85.
SearchConfig default_config();

// Default two-stage funnel: a cheap noisy proxy and an exact full evaluation.
std::vector<EvaluatorStage> default_funnel();

// Default synthetic task: two quadratic bowls with offset centers and a
// standard normal prior. Chemistry axes are derived from run_seed.
TaskContext default_task(std::uint64_t run_seed);

// Unit direction used for the qed_like (which = 0) or sa_like (which = 1)
// chemistry proxy, derived deterministically from the run seed.
std::vector<double> chemistry_axis(std::uint64_t run_seed, std::uint64_t which,
                                   std::size_t d);

// Throws config_error listing every violated constraint.
void validate(const SearchConfig& cfg);

// Feasibility-first comparison key: feasible candidates rank before
// infeasible ones, then higher score, then lower id. NaN scores are treated
// as -inf.
struct LexKey {
  bool feasible = false;
  double score = kNegInf;
  CandidateId id = 0;
};

// True when x ranks strictly before y. Induces a total order for distinct ids.
bool lex_precedes(const LexKey& x, const LexKey& y);

}  // namespace reuse
