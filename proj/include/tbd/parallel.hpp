#pragma once

#include <cstddef>
#include <functional>

namespace tbd {

/// Worker count: TBD_GLMB_THREADS if set (>= 1), else hardware concurrency.
std::size_t worker_count();

/// Overrides the worker count for this process; 0 restores the default.
void set_worker_count(std::size_t n);

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. fn must only
/// write to state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace tbd
