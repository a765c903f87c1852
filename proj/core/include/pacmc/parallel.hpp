#pragma once

#include <cstddef>
#include <functional>

namespace pacmc {

// Number of workers for fan-out loops. Reads PACMC_WORKERS, falling back to
// the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
// is visited exactly once; results must be written to per-index slots so the
// outcome is independent of scheduling. If any call throws, the exception
// from the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pacmc
