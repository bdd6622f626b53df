#include "reuse/types.hpp"

#include <cmath>
#include <sstream>

#include "reuse/rng.hpp"

namespace reuse {

const char* origin_op_name(OriginOp op) {
  switch (op) {
    case OriginOp::prior_init: return "prior_init";
    case OriginOp::mutation: return "mutation";
    case OriginOp::crossover: return "crossover";
    case OriginOp::immigration: return "immigration";
  }
  return "unknown";
}

std::vector<EvaluatorStage> default_funnel() {
  return {
      {1, 0.5, 1.0},  // cheap noisy proxy
      {2, 0.0, 8.0},  // exact full evaluation
  };
}

SearchConfig default_config() {
  SearchConfig cfg;
  cfg.alpha_imm = static_cast<double>(cfg.n_imm) / static_cast<double>(cfg.B_off);
  cfg.alpha_mut = 1.0 - cfg.alpha_cross - cfg.alpha_imm;
  cfg.funnel = default_funnel();
  return cfg;
}

std::vector<double> chemistry_axis(std::uint64_t run_seed, std::uint64_t which,
                                   std::size_t d) {
  Rng rng = derive_rng(run_seed, Stream::chem_axis, which);
  std::vector<double> v(d);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = rng.gaussian();
    norm2 += x * x;
  }
  double norm = std::sqrt(norm2);
  if (norm == 0.0) {
    v.assign(d, 0.0);
    v[0] = 1.0;
    return v;
  }
  for (auto& x : v) x /= norm;
  return v;
}

TaskContext default_task(std::uint64_t run_seed) {
  constexpr std::size_t d = 10;
  TaskContext ctx;
  ctx.pair_id = "dual-bowl-default";
  ctx.landscape_a.center.assign(d, 0.0);
  ctx.landscape_a.center[0] = 0.8;
  ctx.landscape_a.scale = 8.0;
  // Decode spread 0.6 keeps pooled families fingerprint-diverse enough for
  // tau-separated panels even once the population has concentrated.
  ctx.landscape_a.noise_sigma = 0.6;
  ctx.landscape_a.kind = LandscapeKind::quadratic_bowl;
  ctx.landscape_b = ctx.landscape_a;
  ctx.landscape_b.center[0] = -0.8;
  ctx.prior.mode = PriorMode::gaussian;
  ctx.prior.sigma = 1.0;
  ctx.prior.dim = d;
  ctx.chem_qed_axis = chemistry_axis(run_seed, 0, d);
  ctx.chem_sa_axis = chemistry_axis(run_seed, 1, d);
  return ctx;
}

void validate(const SearchConfig& cfg) {
  std::ostringstream bad;
  auto fail = [&bad](const std::string& msg) { bad << "  " << msg << "\n"; };

  if (cfg.d_z < 1) fail("d_z must be >= 1");
  if (cfg.B < 1) fail("B must be >= 1");
  if (cfg.B_par < 1 || cfg.B_par > cfg.B) fail("B_par must satisfy 1 <= B_par <= B");
  if (cfg.B_off < 1) fail("B_off must be >= 1");
  if (cfg.alpha_mut < 0 || cfg.alpha_cross < 0 || cfg.alpha_imm < 0)
    fail("mixture weights must be >= 0");
  double alpha_sum = cfg.alpha_mut + cfg.alpha_cross + cfg.alpha_imm;
  if (std::abs(alpha_sum - 1.0) > 1e-12)
    fail("mixture weights must sum to 1 within 1e-12");
  if (cfg.sigma_mut < 0) fail("sigma_mut must be >= 0");
  if (!(cfg.gamma_mut > 0.0) || cfg.gamma_mut > 1.0)
    fail("gamma_mut must lie in (0, 1]");
  if (cfg.n_imm > cfg.B_off) fail("n_imm must be <= B_off");
  if (cfg.M_eval < 1) fail("M_eval must be >= 1");
  if (cfg.L < 1 || cfg.L > cfg.M_eval) fail("L must satisfy 1 <= L <= M_eval");
  if (cfg.family_size < 1) fail("family_size must be >= 1");
  if (cfg.stage_budgets.empty()) fail("stage_budgets must be nonempty");
  for (std::size_t b : cfg.stage_budgets)
    if (b < 1) fail("every stage budget must be >= 1");
  if (cfg.funnel.size() != cfg.stage_budgets.size())
    fail("funnel must define one stage per stage budget");
  for (std::size_t i = 0; i < cfg.funnel.size(); ++i) {
    const auto& st = cfg.funnel[i];
    if (st.stage_index != static_cast<int>(i) + 1)
      fail("funnel stage_index values must be 1..S in order");
    if (st.noise_sigma < 0) fail("stage noise_sigma must be >= 0");
    if (!(st.cost_units > 0)) fail("stage cost_units must be > 0");
    if (i > 0 && st.noise_sigma > cfg.funnel[i - 1].noise_sigma)
      fail("stage noise_sigma must be non-increasing with stage index");
  }
  if (cfg.N < 2) fail("N must be >= 2");
  if (cfg.tau < 0 || cfg.tau > 1) fail("tau must lie in [0, 1]");
  if (cfg.qed_floor < 0 || cfg.qed_floor > 1) fail("qed_floor must lie in [0, 1]");
  if (cfg.sa_floor < 0 || cfg.sa_floor > 1) fail("sa_floor must lie in [0, 1]");
  if (cfg.beta_chem_search < 0 || cfg.beta_chem_rerank < 0 ||
      cfg.beta_div_subset < 0 || cfg.beta_bal_subset < 0)
    fail("beta weights must be >= 0");
  if (cfg.lambda_bal_proxy < 0) fail("lambda_bal_proxy must be >= 0");
  if (cfg.eta_aff < 0 || cfg.eta_chem < 0 || cfg.eta_div < 0)
    fail("eta weights must be >= 0");

  std::string msg = bad.str();
  if (!msg.empty()) throw config_error("invalid search config:\n" + msg);
}

bool lex_precedes(const LexKey& x, const LexKey& y) {
  if (x.feasible != y.feasible) return x.feasible;
  double xs = std::isnan(x.score) ? kNegInf : x.score;
  double ys = std::isnan(y.score) ? kNegInf : y.score;
  if (xs != ys) return xs > ys;
  return x.id < y.id;
}

}  // namespace reuse
