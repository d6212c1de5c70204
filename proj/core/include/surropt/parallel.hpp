#pragma once

#include <cstddef>
#include <functional>

namespace surropt {

/// Worker count: SURROPT_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) across worker_count() threads. Each index runs
/// exactly once; the first exception thrown is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace surropt
