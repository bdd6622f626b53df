#include "reuse/panel.hpp"

#include <algorithm>
#include <cmath>

#include "reuse/evaluators.hpp"
#include "reuse/scoring.hpp"

namespace reuse {

namespace {

// Feasible pool slice with everything the subset search needs precomputed.
struct PanelWorkspace {
  std::vector<const Candidate*> feasible;  // ascending id
  std::vector<double> quality;             // eta_aff * f_aff + eta_chem * q_chem
  std::vector<double> gap;                 // |A_a - A_b| at the final stage
  std::vector<double> dist;                // row-major pairwise distances
  std::vector<double> suffix_max_quality;

  double d(std::size_t i, std::size_t j) const {
    return dist[i * feasible.size() + j];
  }
};

PanelWorkspace make_workspace(std::span<const Candidate> pool,
                              const SearchConfig& cfg, const TaskContext& ctx) {
  PanelWorkspace ws;
  int final_stage = static_cast<int>(cfg.final_stage());
  for (const Candidate& m : pool)
    if (feasibility(m, cfg, final_stage).feasible) ws.feasible.push_back(&m);
  std::sort(ws.feasible.begin(), ws.feasible.end(),
            [](const Candidate* x, const Candidate* y) { return x->id < y->id; });

  std::size_t n = ws.feasible.size();
  ws.quality.resize(n);
  ws.gap.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate& m = *ws.feasible[i];
    double aff_a = m.affinity_at(final_stage, Target::a);
    double aff_b = m.affinity_at(final_stage, Target::b);
    ws.quality[i] = cfg.eta_aff * balance_affinity(aff_a, aff_b, ctx) +
                    cfg.eta_chem * chemistry_score(m);
    ws.gap[i] = std::abs(aff_a - aff_b);
  }
  ws.dist.resize(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = tanimoto_distance(*ws.feasible[i], *ws.feasible[j]);
      ws.dist[i * n + j] = d;
      ws.dist[j * n + i] = d;
    }
  ws.suffix_max_quality.assign(n + 1, kNegInf);
  for (std::size_t i = n; i-- > 0;)
    ws.suffix_max_quality[i] = std::max(ws.suffix_max_quality[i + 1], ws.quality[i]);
  return ws;
}

double subset_utility(double quality_sum, double gap_sum,
                      double pair_dist_sum, std::size_t n,
                      const SearchConfig& cfg) {
  double nn = static_cast<double>(n);
  double diversity = n < 2 ? 0.0 : 2.0 * pair_dist_sum / (nn * (nn - 1.0));
  return quality_sum / nn + cfg.eta_div * diversity -
         cfg.beta_bal_subset * gap_sum / nn;
}

struct ExactSearch {
  const PanelWorkspace& ws;
  const SearchConfig& cfg;
  bool existence_only = false;

  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best;
  double best_utility = kNegInf;
  bool found = false;

  // DFS over index-ascending subsets. Strict improvement keeps the first
  // subset reaching each utility, which is the lexicographically smallest
  // id tuple at that value.
  void dfs(std::size_t start, double quality_sum, double gap_sum,
           double pair_dist_sum) {
    if (chosen.size() == cfg.N) {
      found = true;
      double u = subset_utility(quality_sum, gap_sum, pair_dist_sum,
                                chosen.size(), cfg);
      if (u > best_utility) {
        best_utility = u;
        best = chosen;
      }
      return;
    }
    if (existence_only && found) return;
    std::size_t n = ws.feasible.size();
    std::size_t need = cfg.N - chosen.size();
    for (std::size_t i = start; i + need <= n; ++i) {
      bool compatible = true;
      for (std::size_t c : chosen) {
        if (ws.d(c, i) < cfg.tau) {
          compatible = false;
          break;
        }
      }
      if (!compatible) continue;
      if (!existence_only) {
        // Admissible bound: best achievable quality for the open slots, full
        // diversity credit, no further balance penalty.
        double bound =
            (quality_sum + ws.quality[i] +
             static_cast<double>(need - 1) * ws.suffix_max_quality[i + 1]) /
                static_cast<double>(cfg.N) +
            cfg.eta_div - cfg.beta_bal_subset * (gap_sum + ws.gap[i]) /
                              static_cast<double>(cfg.N);
        if (bound <= best_utility) continue;
      }
      double add_pairs = 0.0;
      for (std::size_t c : chosen) add_pairs += ws.d(c, i);
      chosen.push_back(i);
      dfs(i + 1, quality_sum + ws.quality[i], gap_sum + ws.gap[i],
          pair_dist_sum + add_pairs);
      chosen.pop_back();
      if (existence_only && found) return;
    }
  }
};

Panel panel_from_indices(const PanelWorkspace& ws,
                         std::span<const std::size_t> indices, double utility,
                         int source_iteration) {
  Panel panel;
  panel.members.reserve(indices.size());
  for (std::size_t i : indices) panel.members.push_back(*ws.feasible[i]);
  panel.utility = utility;
  panel.source_iteration = source_iteration;
  return panel;
}

}  // namespace

bool feasible_family_nonempty(std::span<const Candidate> pool,
                              const SearchConfig& cfg) {
  TaskContext unused_ctx;  // feasibility and distances do not touch the task
  PanelWorkspace ws = make_workspace(pool, cfg, unused_ctx);
  if (ws.feasible.size() < cfg.N) return false;
  if (ws.feasible.size() <= kExactPanelCap) {
    ExactSearch search{ws, cfg, true, {}, {}, kNegInf, false};
    search.dfs(0, 0.0, 0.0, 0.0);
    return search.found;
  }
  // Greedy witness: accept any maximal id-ascending compatible chain.
  std::vector<std::size_t> chain;
  for (std::size_t i = 0; i < ws.feasible.size() && chain.size() < cfg.N; ++i) {
    bool ok = true;
    for (std::size_t c : chain)
      if (ws.d(c, i) < cfg.tau) {
        ok = false;
        break;
      }
    if (ok) chain.push_back(i);
  }
  return chain.size() >= cfg.N;
}

Panel build_panel_exact(std::span<const Candidate> pool, const SearchConfig& cfg,
                        const TaskContext& ctx, int source_iteration) {
  PanelWorkspace ws = make_workspace(pool, cfg, ctx);
  if (ws.feasible.size() > kExactPanelCap)
    throw input_error("build_panel_exact: feasible pool exceeds the exact cap");
  if (ws.feasible.size() < cfg.N) return {};
  ExactSearch search{ws, cfg, false, {}, {}, kNegInf, false};
  search.dfs(0, 0.0, 0.0, 0.0);
  if (!search.found) return {};
  return panel_from_indices(ws, search.best, search.best_utility,
                            source_iteration);
}

Panel build_panel_greedy(std::span<const Candidate> pool, const SearchConfig& cfg,
                         const TaskContext& ctx, int source_iteration) {
  PanelWorkspace ws = make_workspace(pool, cfg, ctx);
  std::size_t n = ws.feasible.size();
  if (n < cfg.N) return {};

  std::size_t seed_idx = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (ws.quality[i] > ws.quality[seed_idx]) seed_idx = i;

  std::vector<std::size_t> chosen{seed_idx};
  std::vector<char> used(n, 0);
  used[seed_idx] = 1;
  double quality_sum = ws.quality[seed_idx];
  double gap_sum = ws.gap[seed_idx];
  double pair_sum = 0.0;

  while (chosen.size() < cfg.N) {
    std::size_t best_i = n;
    double best_u = kNegInf;
    double best_add_pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      bool ok = true;
      double add_pairs = 0.0;
      for (std::size_t c : chosen) {
        if (ws.d(c, i) < cfg.tau) {
          ok = false;
          break;
        }
        add_pairs += ws.d(c, i);
      }
      if (!ok) continue;
      double u = subset_utility(quality_sum + ws.quality[i],
                                gap_sum + ws.gap[i], pair_sum + add_pairs,
                                chosen.size() + 1, cfg);
      if (u > best_u) {
        best_u = u;
        best_i = i;
        best_add_pairs = add_pairs;
      }
    }
    if (best_i == n) return {};  // cannot complete a compatible panel
    used[best_i] = 1;
    chosen.push_back(best_i);
    quality_sum += ws.quality[best_i];
    gap_sum += ws.gap[best_i];
    pair_sum += best_add_pairs;
  }

  double utility = subset_utility(quality_sum, gap_sum, pair_sum,
                                  chosen.size(), cfg);
  std::sort(chosen.begin(), chosen.end());
  return panel_from_indices(ws, chosen, utility, source_iteration);
}

Panel build_panel(std::span<const Candidate> pool, const SearchConfig& cfg,
                  const TaskContext& ctx, int source_iteration) {
  int final_stage = static_cast<int>(cfg.final_stage());
  std::size_t feasible = 0;
  for (const Candidate& m : pool)
    if (feasibility(m, cfg, final_stage).feasible) ++feasible;
  if (feasible <= kExactPanelCap)
    return build_panel_exact(pool, cfg, ctx, source_iteration);
  return build_panel_greedy(pool, cfg, ctx, source_iteration);
}

Panel update_incumbent(Panel current, Panel challenger) {
  if (challenger.utility > current.utility) return challenger;
  return current;
}

}  // namespace reuse
