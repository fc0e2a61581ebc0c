#pragma once

/// Minimal worker pool for independent tasks. Results are written to
/// caller-owned slots indexed by task, so reductions stay in index order and
/// the output does not depend on the thread count.

#include <cstddef>
#include <functional>

namespace reslab {

/// RESLAB_THREADS if set (>= 1), else the hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace reslab
