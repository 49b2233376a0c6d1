#pragma once

#include <cstddef>
#include <functional>

namespace mixmax {

// Worker count for the pure per-cube computations. 0 = hardware concurrency.
void set_worker_threads(int count);
int worker_threads();

// Runs fn(i) for i in [0, n). Results must be written to disjoint slots;
// callers reduce afterwards in a fixed order, so outputs stay deterministic
// for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mixmax
