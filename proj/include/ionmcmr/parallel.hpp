#pragma once

#include <cstddef>
#include <functional>

namespace ionmcmr {

/// Worker count from IONMCMR_WORKERS, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
/// visited exactly once; the first exception thrown is rethrown after all
/// workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ionmcmr
