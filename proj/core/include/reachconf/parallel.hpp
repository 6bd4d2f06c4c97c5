#pragma once

#include <cstddef>
#include <functional>

namespace reachconf {

/// Worker count: REACHCONF_THREADS if set (minimum 1), else the hardware
/// concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// processed exactly once; the first exception thrown is rethrown after all
/// workers have finished.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace reachconf
