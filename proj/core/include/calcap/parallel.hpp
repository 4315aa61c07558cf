#pragma once

#include <cstddef>
#include <functional>

namespace calcap {

/// Worker count: CALCAP_THREADS when set to a positive integer, else the hardware concurrency.
int worker_count();

/// Calls body(i) for i in [0, count) over contiguous chunks. Each index runs exactly once, so writes to
/// per-index slots give results independent of the thread count. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace calcap
