#pragma once

#include <cstddef>
#include <functional>

namespace varidescent {

/// Worker cap: VARIDESCENT_THREADS when set (clamped to >= 1), otherwise the
/// machine parallelism.
int worker_count();

/// Runs fn(begin, end) over disjoint contiguous chunks of [0, n), possibly on
/// several threads. Callers must only write to disjoint slots so results are
/// identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace varidescent
