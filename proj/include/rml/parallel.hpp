#pragma once

#include <cstddef>
#include <functional>

namespace rml {

// Worker count: RML_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results to per-index slots so the outcome is order independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rml
