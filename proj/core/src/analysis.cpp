#include "reuse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "reuse/engine.hpp"
#include "reuse/evaluators.hpp"
#include "reuse/parallel.hpp"
#include "reuse/rng.hpp"
#include "reuse/scoring.hpp"

namespace reuse::analysis {

namespace {

std::vector<CandidateId> top_k_ids(
    std::span<const std::pair<CandidateId, double>> scores, std::size_t k) {
  std::vector<std::pair<CandidateId, double>> sorted(scores.begin(),
                                                     scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::vector<CandidateId> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(sorted[i].first);
  return ids;
}

// Fractional ranks with tie groups averaged.
std::vector<double> average_ranks(std::span<const double> v) {
  std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson_of(std::span<const double> x, std::span<const double> y) {
  std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

// Merge sort counting strict inversions of v.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& tmp,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = count_inversions(v, tmp, lo, mid) +
                        count_inversions(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      count += mid - i;
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return count;
}

// Kendall tau-b by Knight's algorithm: sort by (x, y), subtract tie pairs,
// count discordances as y-inversions.
double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });

  auto pair_count = [](std::uint64_t t) { return t * (t - 1) / 2; };
  std::uint64_t n0 = pair_count(n);
  std::uint64_t n1 = 0, n3 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    n1 += pair_count(j - i + 1);
    // joint ties inside the x-tie block
    std::size_t a = i;
    while (a <= j) {
      std::size_t b = a;
      while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
      n3 += pair_count(b - a + 1);
      a = b + 1;
    }
    i = j + 1;
  }
  std::vector<double> ys(n);
  for (std::size_t t = 0; t < n; ++t) ys[t] = y[order[t]];
  std::uint64_t n2 = 0;
  {
    std::vector<double> sorted_y(ys);
    std::sort(sorted_y.begin(), sorted_y.end());
    std::size_t a = 0;
    while (a < n) {
      std::size_t b = a;
      while (b + 1 < n && sorted_y[b + 1] == sorted_y[a]) ++b;
      n2 += pair_count(b - a + 1);
      a = b + 1;
    }
  }
  std::vector<double> tmp(n);
  std::uint64_t swaps = count_inversions(ys, tmp, 0, n);

  double num = static_cast<double>(n0) - static_cast<double>(n1) -
               static_cast<double>(n2) + static_cast<double>(n3) -
               2.0 * static_cast<double>(swaps);
  double den = std::sqrt(static_cast<double>(n0 - n1)) *
               std::sqrt(static_cast<double>(n0 - n2));
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double h = (static_cast<double>(v.size()) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

}  // namespace

double frontier_overlap(std::span<const std::pair<CandidateId, double>> cheap,
                        std::span<const std::pair<CandidateId, double>> full,
                        std::size_t k) {
  if (cheap.size() != full.size() || cheap.empty())
    throw input_error("frontier_overlap: score lists must be nonempty and equal-sized");
  if (k < 1 || k > cheap.size())
    throw input_error("frontier_overlap: k out of range");
  std::set<CandidateId> ids_cheap, ids_full;
  for (const auto& [id, s] : cheap) ids_cheap.insert(id);
  for (const auto& [id, s] : full) ids_full.insert(id);
  if (ids_cheap.size() != cheap.size() || ids_cheap != ids_full)
    throw input_error("frontier_overlap: id sets differ");

  std::vector<CandidateId> top_cheap = top_k_ids(cheap, k);
  std::vector<CandidateId> top_full = top_k_ids(full, k);
  std::set<CandidateId> cheap_set(top_cheap.begin(), top_cheap.end());
  std::size_t shared = 0;
  for (CandidateId id : top_full) shared += cheap_set.count(id);
  return static_cast<double>(shared) / static_cast<double>(k);
}

RankAgreement rank_agreement(std::span<const double> x,
                             std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw input_error("rank_agreement: need two equal-length lists of size >= 2");
  RankAgreement out;
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  out.spearman = pearson_of(rx, ry);
  out.pearson = pearson_of(x, y);
  out.kendall = kendall_tau_b(x, y);
  return out;
}

DualHitRates dual_hit_rates(const Panel& panel, double threshold_a,
                            double threshold_b, const SearchConfig& cfg) {
  DualHitRates rates;
  if (panel.empty()) return rates;
  int final_stage = static_cast<int>(cfg.final_stage());
  std::size_t hit = 0, feasible_hit = 0;
  for (const Candidate& m : panel.members) {
    bool dual = m.has_affinity(final_stage, Target::a) &&
                m.has_affinity(final_stage, Target::b) &&
                m.affinity_at(final_stage, Target::a) > threshold_a &&
                m.affinity_at(final_stage, Target::b) > threshold_b;
    if (!dual) continue;
    ++hit;
    if (feasibility(m, cfg, final_stage).feasible) ++feasible_hit;
  }
  double n = static_cast<double>(panel.members.size());
  rates.dual_hit = static_cast<double>(hit) / n;
  rates.feasible_dual_hit = static_cast<double>(feasible_hit) / n;
  return rates;
}

ConsistencyResult local_consistency(std::span<const ConsistencyPoint> points,
                                    std::span<const std::size_t> k_set,
                                    double threshold) {
  std::size_t n = points.size();
  if (n < 2) throw input_error("local_consistency: need at least two points");
  if (k_set.empty()) throw input_error("local_consistency: empty k_set");
  for (std::size_t k : k_set)
    if (k < 1 || k >= n)
      throw input_error("local_consistency: every k must satisfy 1 <= k < n");

  std::vector<char> label(n);
  for (std::size_t i = 0; i < n; ++i)
    label[i] = points[i].objective >= threshold ? 1 : 0;

  // Neighbor lists ordered by distance, ties by point index.
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (points[j].coords.size() != points[i].coords.size())
        throw input_error("local_consistency: point dimensions differ");
      double d2 = 0.0;
      for (std::size_t t = 0; t < points[i].coords.size(); ++t) {
        double diff = points[i].coords[t] - points[j].coords[t];
        d2 += diff * diff;
      }
      dist.emplace_back(d2, j);
    }
    std::sort(dist.begin(), dist.end());
    neighbors[i].reserve(dist.size());
    for (const auto& [d2, j] : dist) neighbors[i].push_back(j);
  }

  ConsistencyResult result;
  for (std::size_t k : k_set) {
    double s_sum = 0.0, o_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t same_group = 0, same_label = 0;
      for (std::size_t t = 0; t < k; ++t) {
        std::size_t j = neighbors[i][t];
        if (points[j].group == points[i].group) ++same_group;
        if (label[j] == label[i]) ++same_label;
      }
      s_sum += static_cast<double>(same_group) / static_cast<double>(k);
      o_sum += static_cast<double>(same_label) / static_cast<double>(k);
    }
    result.per_k.push_back(
        {k, s_sum / static_cast<double>(n), o_sum / static_cast<double>(n)});
  }
  for (const auto& row : result.per_k) {
    result.s_bar += row.s;
    result.o_bar += row.o;
  }
  result.s_bar /= static_cast<double>(result.per_k.size());
  result.o_bar /= static_cast<double>(result.per_k.size());
  return result;
}

Region halfspace_region(std::size_t coord, double level, double prior_mass) {
  Region region;
  region.name = "halfspace";
  region.prior_mass = prior_mass;
  region.contains = [coord, level](std::span<const double> z) {
    return coord < z.size() && z[coord] >= level;
  };
  return region;
}

HittingResult hitting_probability_experiment(const Region& region,
                                             const TaskContext& ctx,
                                             const SearchConfig& cfg,
                                             std::size_t runs,
                                             std::size_t workers) {
  if (runs == 0) throw input_error("hitting_probability_experiment: runs == 0");
  validate(cfg);

  HittingResult result;
  result.runs = runs;
  double per_draw = cfg.alpha_imm * region.prior_mass;
  double total_draws = static_cast<double>(cfg.B_off * cfg.T);
  result.bound = 1.0 - std::pow(1.0 - per_draw, total_draws);

  std::vector<char> hit(runs, 0);
  parallel_for(runs, workers, [&](std::size_t r) {
    SearchConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, Stream::experiment, r);
    RunOptions opts;
    opts.decode_pools = false;  // offspring latents match a full run
    RunResult rr = run_search(ctx, run_cfg, opts);
    for (const TraceRecord& rec : rr.trace) {
      for (const OffspringTrace& o : rec.offspring) {
        if (region.contains(o.coords)) {
          hit[r] = 1;
          return;
        }
      }
    }
  });
  for (char h : hit) result.hits += h;
  result.empirical =
      static_cast<double>(result.hits) / static_cast<double>(runs);
  return result;
}

std::vector<SingleRunBudgetRow> budget_table(
    std::span<const TraceRecord> trace, std::span<const std::size_t> budgets) {
  std::vector<const OffspringTrace*> chronological;
  for (const TraceRecord& rec : trace)
    for (const OffspringTrace& o : rec.offspring) chronological.push_back(&o);
  for (std::size_t b : budgets)
    if (b < 1 || b > chronological.size())
      throw input_error("budget_table: budget outside the evaluated range");

  std::vector<SingleRunBudgetRow> rows;
  rows.reserve(budgets.size());
  for (std::size_t b : budgets) {
    SingleRunBudgetRow row;
    row.budget = b;
    for (std::size_t i = 0; i < b; ++i) {
      row.best_so_far = std::max(row.best_so_far, chronological[i]->fitness);
      row.chem_recovered = row.chem_recovered || chronological[i]->chem_ok;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BudgetRow> budget_sweep(const TaskContext& ctx,
                                    const SearchConfig& cfg,
                                    std::span<const std::size_t> budgets,
                                    std::size_t runs) {
  if (runs == 0) throw input_error("budget_sweep: runs == 0");
  std::vector<std::vector<SingleRunBudgetRow>> per_run(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    SearchConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(cfg.seed, Stream::experiment, r);
    RunOptions opts;
    opts.decode_pools = false;
    RunResult rr = run_search(ctx, run_cfg, opts);
    per_run[r] = budget_table(rr.trace, budgets);
  }

  std::vector<BudgetRow> rows;
  rows.reserve(budgets.size());
  for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
    BudgetRow row;
    row.budget = budgets[bi];
    std::vector<double> scores;
    scores.reserve(runs);
    std::size_t recovered = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      scores.push_back(per_run[r][bi].best_so_far);
      recovered += per_run[r][bi].chem_recovered ? 1 : 0;
    }
    row.score_mean =
        std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
    row.score_p25 = quantile(scores, 0.25);
    row.score_p75 = quantile(scores, 0.75);
    row.recovery = static_cast<double>(recovered) / static_cast<double>(runs);
    rows.push_back(row);
  }
  return rows;
}

namespace {

const StageTraceEntry* stage_entry(const CandidateTrace& c, int stage) {
  for (const StageTraceEntry& e : c.stages)
    if (e.stage == stage) return &e;
  return nullptr;
}

}  // namespace

std::vector<PrePostRow> pre_post_selection_compare(
    std::span<const TraceRecord> trace, const SearchConfig& cfg,
    double threshold_a, double threshold_b) {
  // Last iteration that selected a panel.
  const TraceRecord* rec = nullptr;
  for (const TraceRecord& r : trace)
    if (!r.panel_ids.empty()) rec = &r;
  if (rec == nullptr)
    throw input_error("pre_post_selection_compare: trace has no selected panel");
  if (rec->survivor_ids.empty())
    throw input_error("pre_post_selection_compare: trace has no stage pools");

  int final_stage = static_cast<int>(rec->survivor_ids.size());
  std::vector<const CandidateTrace*> terminal;
  for (CandidateId id : rec->survivor_ids.back()) {
    for (const CandidateTrace& c : rec->candidates)
      if (c.id == id) terminal.push_back(&c);
  }

  // Top-N slice of the terminal pool under the final-stage order.
  std::vector<const CandidateTrace*> slice = terminal;
  std::sort(slice.begin(), slice.end(),
            [&](const CandidateTrace* x, const CandidateTrace* y) {
              const StageTraceEntry* ex = stage_entry(*x, final_stage);
              const StageTraceEntry* ey = stage_entry(*y, final_stage);
              LexKey kx{ex != nullptr && ex->feasible,
                        ex != nullptr ? ex->h : kNegInf, x->id};
              LexKey ky{ey != nullptr && ey->feasible,
                        ey != nullptr ? ey->h : kNegInf, y->id};
              return lex_precedes(kx, ky);
            });
  if (slice.size() > cfg.N) slice.resize(cfg.N);

  std::vector<const CandidateTrace*> post;
  for (CandidateId id : rec->panel_ids)
    for (const CandidateTrace& c : rec->candidates)
      if (c.id == id) post.push_back(&c);

  auto make_row = [&](const std::string& name,
                      std::span<const CandidateTrace* const> members) {
    PrePostRow row;
    row.slice = name;
    row.size = members.size();
    if (members.empty()) return row;
    std::size_t dual = 0, feasible_dual = 0;
    double worst_sum = 0.0;
    for (const CandidateTrace* c : members) {
      const StageTraceEntry* e = stage_entry(*c, final_stage);
      if (e == nullptr) continue;
      worst_sum += std::min(e->aff_a, e->aff_b);
      bool hit = e->aff_a > threshold_a && e->aff_b > threshold_b;
      if (!hit) continue;
      ++dual;
      bool feasible = c->valid && c->qed >= cfg.qed_floor && c->sa >= cfg.sa_floor;
      if (feasible) ++feasible_dual;
    }
    double n = static_cast<double>(members.size());
    row.dual_hit = static_cast<double>(dual) / n;
    row.feasible_dual_hit = static_cast<double>(feasible_dual) / n;
    row.worst_target_mean = worst_sum / n;
    return row;
  };

  return {make_row("pre", slice), make_row("post", post)};
}

std::vector<FunnelReportEntry> funnel_report(std::span<const TraceRecord> trace) {
  if (trace.empty()) throw input_error("funnel_report: empty trace");

  std::vector<FunnelReportEntry> out;
  std::size_t stages = 0;
  for (const TraceRecord& rec : trace)
    stages = std::max(stages, rec.survivor_ids.size());

  out.push_back({"iterations", static_cast<double>(trace.size())});
  for (std::size_t s = 0; s <= stages; ++s) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const TraceRecord& rec : trace)
      if (s < rec.pool_sizes.size()) {
        sum += static_cast<double>(rec.pool_sizes[s]);
        ++count;
      }
    out.push_back({"pool_stage" + std::to_string(s) + "_mean",
                   count ? sum / static_cast<double>(count) : 0.0});
  }
  double cost_total = 0.0;
  std::vector<double> cost_stage(stages, 0.0);
  for (const TraceRecord& rec : trace) {
    cost_total += rec.charged_cost;
    for (std::size_t s = 0; s < rec.stage_cost.size() && s < stages; ++s)
      cost_stage[s] += rec.stage_cost[s];
  }
  out.push_back({"cost_total", cost_total});
  for (std::size_t s = 0; s < stages; ++s)
    out.push_back({"cost_stage" + std::to_string(s + 1), cost_stage[s]});

  // Cheap-vs-full agreement over candidates measured at both ends.
  std::vector<std::pair<CandidateId, double>> cheap, full;
  std::vector<double> cheap_scores, full_scores;
  std::uint64_t synth_id = 0;
  int final_stage = static_cast<int>(stages);
  for (const TraceRecord& rec : trace)
    for (const CandidateTrace& c : rec.candidates) {
      const StageTraceEntry* e1 = stage_entry(c, 1);
      const StageTraceEntry* ef = stage_entry(c, final_stage);
      if (e1 == nullptr || ef == nullptr || final_stage <= 1) continue;
      // Synthetic joint key keeps iterations distinct.
      cheap.push_back({synth_id, e1->h});
      full.push_back({synth_id, ef->h});
      cheap_scores.push_back(e1->h);
      full_scores.push_back(ef->h);
      ++synth_id;
    }
  out.push_back({"pairs_compared", static_cast<double>(cheap.size())});
  if (cheap.size() >= 2) {
    for (std::size_t k : {std::size_t{5}, std::size_t{8}}) {
      std::size_t kk = std::min(k, cheap.size());
      out.push_back({"overlap_at_" + std::to_string(k),
                     frontier_overlap(cheap, full, kk)});
    }
    RankAgreement agree = rank_agreement(cheap_scores, full_scores);
    out.push_back({"spearman", agree.spearman});
    out.push_back({"pearson", agree.pearson});
    out.push_back({"kendall", agree.kendall});
  }
  return out;
}

std::vector<FunnelReportEntry> consistency_report(
    std::span<const TraceRecord> trace) {
  std::vector<ConsistencyPoint> points;
  for (const TraceRecord& rec : trace)
    for (const CandidateTrace& c : rec.candidates) {
      const StageTraceEntry* e1 = stage_entry(c, 1);
      if (e1 == nullptr || !std::isfinite(e1->h)) continue;
      ConsistencyPoint p;
      p.coords = c.coords;
      p.group = static_cast<int>(c.latent_id);
      p.objective = e1->h;
      points.push_back(std::move(p));
    }
  if (points.size() < 2)
    throw input_error("consistency_report: not enough scored candidates");

  std::vector<double> objectives;
  objectives.reserve(points.size());
  for (const auto& p : points) objectives.push_back(p.objective);
  std::sort(objectives.begin(), objectives.end());
  double threshold = objectives[objectives.size() / 2];

  std::vector<std::size_t> ks;
  for (std::size_t k : kDefaultConsistencyKs)
    if (k < points.size()) ks.push_back(k);
  if (ks.empty()) ks.push_back(1);

  ConsistencyResult res = local_consistency(points, ks, threshold);
  std::vector<FunnelReportEntry> out;
  out.push_back({"points", static_cast<double>(points.size())});
  out.push_back({"threshold", threshold});
  for (const auto& row : res.per_k) {
    out.push_back({"s_at_" + std::to_string(row.k), row.s});
    out.push_back({"o_at_" + std::to_string(row.k), row.o});
  }
  out.push_back({"s_bar", res.s_bar});
  out.push_back({"o_bar", res.o_bar});
  return out;
}

}  // namespace reuse::analysis
