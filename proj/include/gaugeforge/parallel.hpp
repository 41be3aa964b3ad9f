#pragma once

#include <cstddef>
#include <functional>

namespace gaugeforge {

// Worker count: hardware concurrency capped by GAUGEFORGE_THREADS.
unsigned worker_count();

// Runs body(i) for i in [0, n). Iterations must be independent; results are
// identical to a sequential loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gaugeforge
