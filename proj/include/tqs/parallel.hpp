#pragma once

#include <cstddef>
#include <functional>

namespace tqs {

// Worker count: TQS_THREADS env var if set, else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, count).  Results must be written to disjoint,
// index-addressed slots so the output is independent of scheduling.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

} // namespace tqs
