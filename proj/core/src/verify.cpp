#include "reuse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "reuse/analysis.hpp"
#include "reuse/engine.hpp"
#include "reuse/evaluators.hpp"
#include "reuse/funnel.hpp"
#include "reuse/generator.hpp"
#include "reuse/panel.hpp"
#include "reuse/scoring.hpp"
#include "reuse/types.hpp"

namespace reuse::verify {

namespace {

// Accumulates one named check across many runs; keeps the first few failure
// messages as the detail.
class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }

  void require(bool cond, const std::string& msg) {
    if (cond) return;
    result_.passed = false;
    if (failures_ < 4) {
      if (!result_.detail.empty()) result_.detail += "; ";
      result_.detail += msg;
    }
    ++failures_;
  }

  CheckResult done(const std::string& ok_detail = "") {
    if (result_.passed && result_.detail.empty()) result_.detail = ok_detail;
    if (failures_ > 4)
      result_.detail += " (+" + std::to_string(failures_ - 4) + " more)";
    return result_;
  }

 private:
  CheckResult result_{.name = "", .passed = true, .detail = ""};
  int failures_ = 0;
};

bool close(double a, double b, double tol = 1e-9) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string at_run(std::size_t r, const std::string& msg) {
  return "run " + std::to_string(r) + ": " + msg;
}

Candidate candidate_from_trace(const CandidateTrace& t, std::size_t stages) {
  Candidate m;
  m.id = t.id;
  m.origin_latent = t.latent_id;
  m.valid = t.valid;
  m.qed_like = t.qed;
  m.sa_like = t.sa;
  m.features.bits = t.fingerprint;
  m.latent = t.coords;
  m.ensure_stage_slots(stages);
  for (const StageTraceEntry& s : t.stages) {
    if (s.stage < 1 || static_cast<std::size_t>(s.stage) > stages) continue;
    m.affinity[s.stage - 1].a = s.aff_a;
    m.affinity[s.stage - 1].b = s.aff_b;
  }
  return m;
}

bool ids_subset(const std::vector<CandidateId>& sub,
                const std::vector<CandidateId>& super) {
  std::set<CandidateId> s(super.begin(), super.end());
  return std::all_of(sub.begin(), sub.end(),
                     [&s](CandidateId id) { return s.count(id) != 0; });
}

std::vector<Candidate> random_pool(const TaskContext& ctx,
                                   std::size_t n_latents, std::size_t k,
                                   std::uint64_t seed, IdSource& ids) {
  auto latents =
      sample_prior(ctx.prior, derive_seed(seed, Stream::prior_init), n_latents, ids);
  std::vector<Candidate> pool;
  pool.reserve(n_latents * k);
  for (const LatentPoint& z : latents) {
    auto family =
        decode_family(z, ctx, k, derive_seed(seed, Stream::pool_decode, z.id), ids);
    pool.insert(pool.end(), family.begin(), family.end());
  }
  return pool;
}

void measure_final_stage(std::vector<Candidate>& pool, const SearchConfig& cfg,
                         const TaskContext& ctx, std::uint64_t seed) {
  const EvaluatorStage& stage = cfg.funnel.back();
  for (Candidate& m : pool) {
    affinity(m, Target::a, stage, ctx, seed);
    affinity(m, Target::b, stage, ctx, seed);
  }
}

// Plain combination enumeration over the feasible pool; intentionally shares
// no code with the pruned search it cross-checks.
Panel brute_force_best_panel(std::span<const Candidate> pool,
                             const SearchConfig& cfg, const TaskContext& ctx,
                             double* second_best = nullptr) {
  const int final_stage = static_cast<int>(cfg.final_stage());
  std::vector<Candidate> feas;
  for (const Candidate& m : pool)
    if (feasibility(m, cfg, final_stage).feasible) feas.push_back(m);
  std::sort(feas.begin(), feas.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });

  Panel best;
  if (second_best) *second_best = kNegInf;
  const std::size_t n = feas.size(), N = cfg.N;
  if (n < N || N == 0) return best;

  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto advance = [&]() {
    for (std::size_t i = N; i-- > 0;) {
      if (idx[i] != i + n - N) {
        ++idx[i];
        for (std::size_t j = i + 1; j < N; ++j) idx[j] = idx[j - 1] + 1;
        return true;
      }
    }
    return false;
  };

  do {
    bool separated = true;
    for (std::size_t i = 0; i < N && separated; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        if (tanimoto_distance(feas[idx[i]], feas[idx[j]]) < cfg.tau) {
          separated = false;
          break;
        }
    if (!separated) continue;
    std::vector<Candidate> subset;
    subset.reserve(N);
    for (std::size_t i : idx) subset.push_back(feas[i]);
    double u = panel_utility(subset, cfg, ctx);
    if (u > best.utility) {
      if (second_best) *second_best = best.utility;
      best.members = std::move(subset);
      best.utility = u;
    } else if (second_best && u > *second_best) {
      *second_best = u;
    }
  } while (advance());
  return best;
}

std::vector<CandidateId> member_ids(const Panel& p) {
  std::vector<CandidateId> ids;
  ids.reserve(p.members.size());
  for (const Candidate& m : p.members) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool panel_well_formed(const Panel& p, const SearchConfig& cfg,
                       std::string* why) {
  const int final_stage = static_cast<int>(cfg.final_stage());
  if (p.members.size() != cfg.N) {
    *why = "size " + std::to_string(p.members.size());
    return false;
  }
  for (const Candidate& m : p.members)
    if (!feasibility(m, cfg, final_stage).feasible) {
      *why = "infeasible member " + std::to_string(m.id);
      return false;
    }
  for (std::size_t i = 0; i < p.members.size(); ++i)
    for (std::size_t j = i + 1; j < p.members.size(); ++j)
      if (tanimoto_distance(p.members[i], p.members[j]) < cfg.tau) {
        *why = "pair below tau";
        return false;
      }
  return true;
}

}  // namespace

std::vector<CheckResult> theorems_suite(std::uint64_t base_seed,
                                        std::size_t runs) {
  Check monotone("incumbent_monotone");
  Check persistence("incumbent_persistence");
  Check constraints("panel_constraints");
  Check recompute("panel_utility_recomputed");
  Check popsize("population_size");
  Check fitness("best_fitness_monotone");
  Check nesting("survivor_nesting");
  Check costs("cost_accounting");

  SearchConfig cfg = default_config();
  for (std::size_t r = 0; r < runs; ++r) {
    cfg.seed = base_seed + r;
    TaskContext ctx = default_task(cfg.seed);
    RunResult result = run_search(ctx, cfg);

    const std::size_t stages = cfg.final_stage();
    double incumbent_so_far = kNegInf;
    double panel_max = kNegInf;
    double best_fit = kNegInf;
    double total = 0.0;

    for (const TraceRecord& rec : result.trace) {
      const std::string where =
          at_run(r, "iteration " + std::to_string(rec.iteration));

      double inc = rec.incumbent_utility ? *rec.incumbent_utility : kNegInf;
      monotone.require(inc >= incumbent_so_far, where + ": incumbent dropped");
      incumbent_so_far = inc;
      if (rec.panel_utility) panel_max = std::max(panel_max, *rec.panel_utility);
      persistence.require(inc == panel_max,
                          where + ": incumbent != max panel utility so far");

      popsize.require(rec.population_ids.size() == cfg.B,
                      where + ": population size");
      fitness.require(rec.best_fitness >= best_fit, where + ": fitness dropped");
      best_fit = rec.best_fitness;

      std::unordered_map<CandidateId, const CandidateTrace*> by_id;
      for (const CandidateTrace& c : rec.candidates) by_id[c.id] = &c;

      // nesting and budgets over the recorded survivor chain
      nesting.require(rec.pool_sizes.size() == stages + 1 &&
                          rec.survivor_ids.size() == stages,
                      where + ": trace shape");
      if (rec.pool_sizes.size() == stages + 1 &&
          rec.survivor_ids.size() == stages) {
        nesting.require(rec.pool_sizes[0] == rec.candidates.size(),
                        where + ": stage-0 size");
        std::vector<CandidateId> prev;
        prev.reserve(rec.candidates.size());
        for (const CandidateTrace& c : rec.candidates) prev.push_back(c.id);
        for (std::size_t s = 0; s < stages; ++s) {
          const auto& ids = rec.survivor_ids[s];
          std::size_t expect =
              std::min(rec.pool_sizes[s], cfg.stage_budgets[s]);
          nesting.require(ids.size() == rec.pool_sizes[s + 1] &&
                              ids.size() == expect,
                          where + ": stage " + std::to_string(s + 1) + " size");
          nesting.require(ids_subset(ids, prev),
                          where + ": stage " + std::to_string(s + 1) +
                              " not nested");
          prev = ids;
        }
      }

      // per-iteration cost recomputation
      if (rec.stage_cost.size() == stages) {
        double charged = 0.0;
        for (std::size_t s = 0; s < stages; ++s) {
          double expect = static_cast<double>(rec.pool_sizes[s]) *
                          cfg.funnel[s].cost_units;
          costs.require(close(rec.stage_cost[s], expect),
                        where + ": stage " + std::to_string(s + 1) + " cost");
          charged += rec.stage_cost[s];
        }
        costs.require(close(rec.charged_cost, charged),
                      where + ": charged_cost mismatch");
        total += rec.charged_cost;
      } else {
        costs.require(false, where + ": stage_cost shape");
      }

      // panel constraint preservation
      if (rec.panel_utility) {
        constraints.require(rec.panel_ids.size() == cfg.N,
                            where + ": panel size");
        std::vector<Candidate> members;
        bool resolved = true;
        for (CandidateId id : rec.panel_ids) {
          auto it = by_id.find(id);
          if (it == by_id.end()) {
            resolved = false;
            break;
          }
          members.push_back(candidate_from_trace(*it->second, stages));
        }
        constraints.require(resolved, where + ": panel id not in pool");
        if (resolved) {
          for (const Candidate& m : members)
            constraints.require(
                feasibility(m, cfg, static_cast<int>(stages)).feasible,
                where + ": infeasible panel member");
          for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
              constraints.require(
                  tanimoto_distance(members[i], members[j]) >= cfg.tau,
                  where + ": panel pair below tau");
          recompute.require(
              close(panel_utility(members, cfg, ctx), *rec.panel_utility),
              where + ": panel utility recomputation");
        }
      } else {
        constraints.require(rec.panel_ids.empty(),
                            where + ": empty panel with ids");
      }
    }

    const std::string where = at_run(r, "final");
    costs.require(close(result.total_cost, total), where + ": total_cost");
    popsize.require(result.final_population.size() == cfg.B,
                    where + ": final population size");
    if (result.incumbent.empty()) {
      monotone.require(incumbent_so_far == kNegInf,
                       where + ": empty incumbent after finite utility");
    } else {
      monotone.require(result.incumbent.utility == incumbent_so_far,
                       where + ": incumbent != last trace value");
      recompute.require(
          close(panel_utility(result.incumbent.members, cfg, ctx),
                result.incumbent.utility),
          where + ": incumbent utility recomputation");
    }
  }

  std::string summary = std::to_string(runs) + " seeded runs";
  return {monotone.done(summary),  persistence.done(summary),
          constraints.done(summary), recompute.done(summary),
          popsize.done(summary),   fitness.done(summary),
          nesting.done(summary),   costs.done(summary)};
}

std::vector<CheckResult> funnel_suite(std::uint64_t base_seed,
                                      std::size_t runs) {
  Check nested("survivors_nested");
  Check budget("budget_rule");
  Check feasfirst("feasibility_first");
  Check costs("stage_costs");
  Check witness("witness_survival");

  SearchConfig cfg = default_config();
  for (std::size_t r = 0; r < runs; ++r) {
    std::uint64_t seed = derive_seed(base_seed, Stream::experiment, r, 1);
    TaskContext ctx = default_task(seed);
    IdSource ids;
    std::vector<Candidate> pool = random_pool(ctx, 16, 6, seed, ids);

    StagePool pool0;
    pool0.members = pool;
    CostLedger ledger;
    std::vector<std::vector<ScoredCandidate>> stage_scores;
    auto pools = run_funnel(pool0, cfg, ctx, seed, ledger, 1, &stage_scores);

    const std::string where = at_run(r, "funnel");
    const std::size_t stages = cfg.final_stage();
    budget.require(pools.size() == stages + 1, where + ": stage count");
    for (std::size_t s = 1; s < pools.size(); ++s) {
      const auto& in = pools[s - 1].members;
      const auto& out = pools[s].members;
      std::size_t expect = std::min(in.size(), cfg.stage_budgets[s - 1]);
      budget.require(out.size() == expect,
                     where + ": stage " + std::to_string(s) + " size " +
                         std::to_string(out.size()));

      std::vector<CandidateId> in_ids, out_ids;
      for (const Candidate& m : in) in_ids.push_back(m.id);
      for (const Candidate& m : out) out_ids.push_back(m.id);
      nested.require(ids_subset(out_ids, in_ids),
                     where + ": stage " + std::to_string(s) + " not nested");

      // feasibility-first: survivors hold as many feasible candidates as the
      // budget allows, and infeasible ones appear only when feasibles ran out
      const auto& scores = stage_scores[s - 1];
      feasfirst.require(scores.size() == in.size(),
                        where + ": score alignment");
      if (scores.size() == in.size()) {
        std::set<CandidateId> feas_in, surv(out_ids.begin(), out_ids.end());
        for (const ScoredCandidate& sc : scores)
          if (sc.feasible) feas_in.insert(sc.candidate_id);
        std::size_t feas_surv = 0;
        for (CandidateId id : out_ids) feas_surv += feas_in.count(id);
        feasfirst.require(feas_surv == std::min(feas_in.size(), expect),
                          where + ": stage " + std::to_string(s) +
                              " dropped a feasible candidate early");
        if (feas_surv < out_ids.size())
          feasfirst.require(feas_in.size() < expect,
                            where + ": infeasible survivor despite spare "
                                    "feasible candidates");
      }
    }
    double expect_total = 0.0;
    for (std::size_t s = 0; s < stages && s + 1 < pools.size(); ++s)
      expect_total += static_cast<double>(pools[s].members.size()) *
                      cfg.funnel[s].cost_units;
    costs.require(close(ledger.total, expect_total), where + ": ledger total");

    // Witness survival: append a hand-built feasible candidate whose
    // affinity strictly dominates the pool under a zero-noise funnel. The
    // dominance margin is verified computationally before asserting survival.
    SearchConfig zero = cfg;
    for (EvaluatorStage& st : zero.funnel) st.noise_sigma = 0.0;

    Candidate w;
    w.latent.assign(zero.d_z, 0.0);
    w.features = fingerprint_of(w.latent);
    w.qed_like = 0.9;
    w.sa_like = 0.9;
    w.valid = true;
    w.origin_latent = ids.reserve_latents(1);
    w.id = ids.reserve_candidates(1);

    std::vector<Candidate> wpool = pool;
    wpool.push_back(w);

    auto f_aff = [&](const Candidate& m) {
      double a = landscape_value(ctx.landscape_a, m.latent);
      double b = landscape_value(ctx.landscape_b, m.latent);
      return balance_affinity(a, b, ctx);
    };
    double w_aff = f_aff(w);
    double other_aff = kNegInf, other_chem = 0.0;
    for (const Candidate& m : pool) {
      other_aff = std::max(other_aff, f_aff(m));
      other_chem = std::max(other_chem, chemistry_score(m));
    }
    double max_beta = std::max(zero.beta_chem_search, zero.beta_chem_rerank);
    double margin = w_aff - other_aff -
                    max_beta * std::max(0.0, other_chem - chemistry_score(w)) -
                    zero.beta_div_subset;
    witness.require(margin > 1e-9, where + ": witness does not dominate");
    if (margin > 1e-9) {
      StagePool wp0;
      wp0.members = wpool;
      CostLedger wl;
      auto wpools = run_funnel(wp0, zero, ctx, seed, wl);
      bool survived = false;
      for (const Candidate& m : wpools.back().members)
        if (m.id == w.id) survived = true;
      witness.require(survived, where + ": dominating witness eliminated");
    }
  }

  std::string summary = std::to_string(runs) + " randomized pools";
  return {nested.done(summary), budget.done(summary), feasfirst.done(summary),
          costs.done(summary), witness.done(summary)};
}

std::vector<CheckResult> panel_suite(std::uint64_t base_seed,
                                     std::size_t runs) {
  Check oracle("exact_matches_bruteforce");
  Check valid("exact_panel_valid");
  Check greedy("greedy_not_above_exact");
  Check existence("existence_matches_bruteforce");
  Check ties("exact_tie_break_lowest_ids");
  Check incumbent("incumbent_update_semantics");

  SearchConfig cfg = default_config();
  cfg.N = 3;
  for (std::size_t r = 0; r < runs; ++r) {
    std::uint64_t seed = derive_seed(base_seed, Stream::experiment, r, 2);
    TaskContext ctx = default_task(seed);
    IdSource ids;
    std::vector<Candidate> pool = random_pool(ctx, 5, 3, seed, ids);
    measure_final_stage(pool, cfg, ctx, seed);

    const std::string where = at_run(r, "pool");
    double second = kNegInf;
    Panel brute = brute_force_best_panel(pool, cfg, ctx, &second);
    Panel exact = build_panel_exact(pool, cfg, ctx);
    Panel greedy_panel = build_panel_greedy(pool, cfg, ctx);

    oracle.require(close(exact.utility, brute.utility),
                   where + ": exact utility != brute force");
    if (!brute.empty() && brute.utility - second > 1e-6)
      oracle.require(member_ids(exact) == member_ids(brute),
                     where + ": member sets differ on a clear winner");
    std::string why;
    if (!exact.empty())
      valid.require(panel_well_formed(exact, cfg, &why), where + ": " + why);
    valid.require(exact.empty() == brute.empty(),
                  where + ": emptiness disagrees with brute force");
    existence.require(feasible_family_nonempty(pool, cfg) == !brute.empty(),
                      where + ": existence test disagrees");

    greedy.require(greedy_panel.utility <= exact.utility + 1e-9,
                   where + ": greedy above exact");
    if (!greedy_panel.empty())
      greedy.require(panel_well_formed(greedy_panel, cfg, &why),
                     where + ": greedy " + why);
  }

  // Deterministic tie-break: two content-identical candidates (ids 1 and 2)
  // can each pair with candidate 3; the exact search must pick id 1.
  {
    SearchConfig tcfg = default_config();
    tcfg.N = 2;
    TaskContext ctx = default_task(base_seed);
    auto mk = [&](CandidateId id, std::uint64_t bits) {
      Candidate m;
      m.id = id;
      m.valid = true;
      m.qed_like = m.sa_like = 0.9;
      m.features.bits = bits;
      m.latent.assign(tcfg.d_z, 0.0);
      m.ensure_stage_slots(tcfg.final_stage());
      m.affinity.back().a = 5.0;
      m.affinity.back().b = 5.0;
      return m;
    };
    std::vector<Candidate> pool = {mk(1, 0x0Full), mk(2, 0x0Full),
                                   mk(3, 0xFF00ull)};
    Panel p = build_panel_exact(pool, tcfg, ctx);
    ties.require(member_ids(p) == std::vector<CandidateId>({1, 3}),
                 "picked ids other than {1, 3}");
  }

  // Incumbent update: strict improvement replaces, ties and regressions keep.
  {
    auto panel_with = [](double u, int iter) {
      Panel p;
      p.members.resize(1);
      p.members[0].id = static_cast<CandidateId>(iter);
      p.utility = u;
      p.source_iteration = iter;
      return p;
    };
    Panel inc = update_incumbent(Panel{}, panel_with(1.0, 0));
    incumbent.require(inc.source_iteration == 0, "empty incumbent not replaced");
    inc = update_incumbent(std::move(inc), panel_with(2.0, 1));
    incumbent.require(inc.source_iteration == 1 && inc.utility == 2.0,
                      "strict improvement not taken");
    inc = update_incumbent(std::move(inc), panel_with(2.0, 2));
    incumbent.require(inc.source_iteration == 1, "tie displaced incumbent");
    inc = update_incumbent(std::move(inc), panel_with(1.5, 3));
    incumbent.require(inc.source_iteration == 1 && inc.utility == 2.0,
                      "regression displaced incumbent");
    Panel still_empty = update_incumbent(Panel{}, Panel{});
    incumbent.require(still_empty.empty(), "two empties produced members");
  }

  std::string summary = std::to_string(runs) + " randomized pools";
  return {oracle.done(summary),    valid.done(summary),
          greedy.done(summary),    existence.done(summary),
          ties.done("constructed"), incumbent.done("constructed")};
}

std::vector<CheckResult> hitting_suite(std::uint64_t base_seed,
                                       std::size_t runs) {
  Check bound_formula("bound_formula");
  Check meets("empirical_meets_bound");

  SearchConfig cfg = default_config();
  cfg.seed = base_seed;
  TaskContext ctx = default_task(base_seed);
  analysis::Region region = analysis::halfspace_region(0, 0.0, 0.5);

  auto result = analysis::hitting_probability_experiment(region, ctx, cfg, runs);

  double expect =
      1.0 - std::pow(1.0 - cfg.alpha_imm * region.prior_mass,
                     static_cast<double>(cfg.B_off * cfg.T));
  bound_formula.require(close(result.bound, expect, 1e-12),
                        "reported bound != closed form");

  double sigma = std::sqrt(result.bound * (1.0 - result.bound) /
                           static_cast<double>(runs));
  char buf[160];
  std::snprintf(buf, sizeof buf, "empirical %.4f vs bound %.4f - 3s = %.4f",
                result.empirical, result.bound, result.bound - 3.0 * sigma);
  meets.require(result.empirical >= result.bound - 3.0 * sigma, buf);

  std::string summary = std::to_string(runs) + " replications";
  return {bound_formula.done(summary), meets.done(buf)};
}

std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t base_seed, std::size_t runs) {
  if (suite == "theorems") return theorems_suite(base_seed, runs);
  if (suite == "funnel") return funnel_suite(base_seed, runs);
  if (suite == "panel") return panel_suite(base_seed, runs);
  if (suite == "hitting") return hitting_suite(base_seed, runs);
  throw config_error("unknown verify suite '" + suite +
                     "' (expected theorems, funnel, panel or hitting)");
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& c) { return c.passed; });
}

}  // namespace reuse::verify
