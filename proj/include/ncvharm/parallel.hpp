#pragma once

#include <cstddef>
#include <functional>

namespace ncvharm {

// Worker count: NCVHARM_THREADS when set (>= 1), else 1.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker; callers write
// results into per-index slots so the output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ncvharm
