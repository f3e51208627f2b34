#pragma once

#include <cstddef>
#include <functional>

namespace smart {

/// Worker cap from the SMART_THREADS environment variable; 0 or unset means
/// hardware concurrency.
std::size_t max_threads();

/// Runs fn(i) for i in [0, count). Tasks must write only to their own slots;
/// results are reduced by the caller in index order, so parallel execution
/// cannot change any outcome.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace smart
