#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace segbed {

// Number of workers to use: explicit request, else SEGBED_JOBS, else the
// hardware concurrency.
std::size_t resolve_jobs(int requested = 0);

// Runs fn(i) for i in [0, n) on up to `jobs` transient threads. Work is
// dealt in fixed index order from a shared counter; each index is executed
// exactly once. Callers that need deterministic floating-point results must
// make fn(i) write only to slot i (the reduction order is then theirs to
// fix, independent of thread scheduling).
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

} // namespace segbed
