#pragma once

#include <functional>

namespace light4d {

// Worker count: LIGHT4D_THREADS if set and positive, else hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker, so
// results written per index are deterministic regardless of thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace light4d
