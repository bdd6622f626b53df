#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reuse/panel.hpp"
#include "reuse/types.hpp"

namespace reuse {

inline constexpr int kTraceSchemaVersion = 1;

// Per-stage view of one pooled candidate, recorded once the candidate has
// been measured at that stage.
struct StageTraceEntry {
  int stage = 0;
  double aff_a = 0.0;
  double aff_b = 0.0;
  double h = kNegInf;
  bool feasible = false;
};

struct CandidateTrace {
  CandidateId id = 0;
  LatentId latent_id = 0;
  bool valid = true;
  double qed = 0.0;
  double sa = 0.0;
  std::uint64_t fingerprint = 0;
  std::vector<double> coords;  // decoded latent position
  std::vector<StageTraceEntry> stages;
};

struct OffspringTrace {
  LatentId id = 0;
  OriginOp op = OriginOp::prior_init;
  double fitness = kNegInf;
  bool chem_ok = false;  // fitness family contained a chemistry-feasible member
  std::vector<double> coords;
};

struct TraceRecord {
  int schema_version = kTraceSchemaVersion;
  std::uint32_t iteration = 0;  // 1-based
  std::vector<std::size_t> pool_sizes;  // stages 0..S
  std::vector<std::vector<CandidateId>> survivor_ids;  // stages 1..S
  std::vector<double> stage_cost;  // charge per stage this iteration
  double charged_cost = 0.0;       // sum of stage_cost
  std::optional<double> panel_utility;  // nullopt encodes an empty panel
  std::vector<CandidateId> panel_ids;
  std::optional<double> incumbent_utility;
  std::vector<OffspringTrace> offspring;
  std::vector<CandidateTrace> candidates;  // stage-0 pool detail
  std::vector<LatentId> population_ids;
  double best_fitness = kNegInf;
};

struct PopulationMember {
  LatentPoint latent;
  double fitness = kNegInf;
};

struct RunResult {
  Panel incumbent;
  std::vector<TraceRecord> trace;
  double total_cost = 0.0;
  double wall_seconds = 0.0;
  SearchConfig config;  // effective configuration echo
  TaskContext task;
  std::uint64_t seed = 0;
  std::vector<PopulationMember> final_population;
};

}  // namespace reuse
