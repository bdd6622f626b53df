#pragma once

#include <cstddef>
#include <functional>

namespace reuse {

// Runs fn(i) for i in [0, n). With workers > 1 the index range is split into
// contiguous chunks, one thread per chunk. Callers write results into
// index-addressed slots, so the merged outcome never depends on the worker
// count or on scheduling.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace reuse
