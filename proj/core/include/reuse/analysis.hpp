#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reuse/panel.hpp"
#include "reuse/trace.hpp"
#include "reuse/types.hpp"

namespace reuse::analysis {

// Fraction of shared members between the top-k sets of two score lists over
// the same ids. Ranking ties resolve to the lower id.
double frontier_overlap(std::span<const std::pair<CandidateId, double>> cheap,
                        std::span<const std::pair<CandidateId, double>> full,
                        std::size_t k);

struct RankAgreement {
  double spearman = 0.0;
  double pearson = 0.0;
  double kendall = 0.0;  // tau-b
};

// All three coefficients over paired samples. A constant input yields NaN for
// the affected coefficients rather than a crash.
RankAgreement rank_agreement(std::span<const double> x,
                             std::span<const double> y);

struct DualHitRates {
  double dual_hit = 0.0;
  double feasible_dual_hit = 0.0;
};

// Fraction of panel members whose final-stage affinities exceed both
// thresholds; the feasible variant additionally requires hard feasibility.
DualHitRates dual_hit_rates(const Panel& panel, double threshold_a,
                            double threshold_b, const SearchConfig& cfg);

struct ConsistencyPoint {
  std::vector<double> coords;
  int group = 0;
  double objective = 0.0;
};

struct ConsistencyResult {
  double s_bar = 0.0;  // neighborhood group purity
  double o_bar = 0.0;  // neighborhood objective-label purity
  struct PerK {
    std::size_t k;
    double s;
    double o;
  };
  std::vector<PerK> per_k;
};

inline const std::vector<std::size_t> kDefaultConsistencyKs = {3, 5, 10};

// Mean fraction of k nearest neighbors (Euclidean, ties by index) sharing a
// point's structural group (S) and its thresholded objective label (O),
// averaged across points and across k_set.
ConsistencyResult local_consistency(std::span<const ConsistencyPoint> points,
                                    std::span<const std::size_t> k_set,
                                    double threshold);

struct Region {
  std::string name;
  double prior_mass = 0.0;  // q under the initialization prior
  std::function<bool(std::span<const double>)> contains;
};

// Half-space {z : z[coord] >= level}; mass 0.5 at level 0 under the
// zero-mean gaussian prior.
Region halfspace_region(std::size_t coord, double level, double prior_mass);

struct HittingResult {
  std::size_t runs = 0;
  std::size_t hits = 0;
  double empirical = 0.0;
  double bound = 0.0;  // 1 - (1 - alpha_imm * q)^(B_off * T)
};

// Seeded replications of the search; a run counts as a hit when any offspring
// latent lands in the region within T iterations.
HittingResult hitting_probability_experiment(const Region& region,
                                             const TaskContext& ctx,
                                             const SearchConfig& cfg,
                                             std::size_t runs,
                                             std::size_t workers = 1);

struct BudgetRow {
  std::size_t budget = 0;
  double score_mean = 0.0;
  double score_p25 = 0.0;
  double score_p75 = 0.0;
  double recovery = 0.0;  // fraction of runs with a chem-feasible candidate seen
};

// Best-so-far family utility and chemistry-floor recovery, per offspring
// evaluation budget, aggregated over seeded runs.
std::vector<BudgetRow> budget_sweep(const TaskContext& ctx,
                                    const SearchConfig& cfg,
                                    std::span<const std::size_t> budgets,
                                    std::size_t runs);

// Same table for a single recorded run.
struct SingleRunBudgetRow {
  std::size_t budget = 0;
  double best_so_far = kNegInf;
  bool chem_recovered = false;
};
std::vector<SingleRunBudgetRow> budget_table(
    std::span<const TraceRecord> trace, std::span<const std::size_t> budgets);

struct PrePostRow {
  std::string slice;  // "pre" or "post"
  std::size_t size = 0;
  double dual_hit = 0.0;
  double feasible_dual_hit = 0.0;
  double worst_target_mean = 0.0;
};

// Compares the terminal pool's top-N-by-h slice with the last selected panel
// of a recorded run.
std::vector<PrePostRow> pre_post_selection_compare(
    std::span<const TraceRecord> trace, const SearchConfig& cfg,
    double threshold_a, double threshold_b);

struct FunnelReportEntry {
  std::string metric;
  double value = 0.0;
};

// Cheap-versus-full agreement over candidates measured at both the first and
// the final stage, plus pool size and cost summaries.
std::vector<FunnelReportEntry> funnel_report(std::span<const TraceRecord> trace);

// Consistency report over a recorded run: pooled candidates as points,
// originating latent as structural group, first-stage h as objective,
// median objective as threshold.
std::vector<FunnelReportEntry> consistency_report(
    std::span<const TraceRecord> trace);

}  // namespace reuse::analysis
