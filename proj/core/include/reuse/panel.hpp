#pragma once

#include <span>
#include <vector>

#include "reuse/types.hpp"

namespace reuse {

// Largest feasible-candidate count the exact panel solver accepts. Terminal
// pools default to 20 members, so exact construction is the normal path.
inline constexpr std::size_t kExactPanelCap = 25;

struct Panel {
  std::vector<Candidate> members;
  double utility = kNegInf;
  int source_iteration = -1;

  bool empty() const { return members.empty(); }
};

// Whether the pool admits any feasible panel: N members, all hard-feasible at
// the final stage, pairwise Tanimoto distance >= tau. Exact decision up to
// kExactPanelCap feasible candidates, greedy witness search beyond it.
bool feasible_family_nonempty(std::span<const Candidate> pool,
                              const SearchConfig& cfg);

// Exhaustive best-panel search with branch pruning. Ties resolve to the
// lexicographically smallest id tuple. Throws input_error when the feasible
// pool exceeds kExactPanelCap.
Panel build_panel_exact(std::span<const Candidate> pool, const SearchConfig& cfg,
                        const TaskContext& ctx, int source_iteration = -1);

// Greedy fallback: best single candidate first, then best marginal gain
// subject to the distance constraint. Returns an empty panel when it cannot
// place N members.
Panel build_panel_greedy(std::span<const Candidate> pool, const SearchConfig& cfg,
                         const TaskContext& ctx, int source_iteration = -1);

// Exact when the feasible pool fits under the cap, greedy otherwise.
Panel build_panel(std::span<const Candidate> pool, const SearchConfig& cfg,
                  const TaskContext& ctx, int source_iteration = -1);

// Challenger replaces the incumbent only on strict utility improvement.
Panel update_incumbent(Panel current, Panel challenger);

}  // namespace reuse
