/* parallel.hpp -- deterministic fork-join helper for pair scoring. */

#pragma once

#include <cstddef>
#include <functional>

namespace apfa {

/// Process-wide worker cap. 0 or negative resets to hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs fn(0..n-1), possibly on several threads. Each index is handled
/// exactly once; callers make runs deterministic by writing to disjoint
/// slots keyed by index. Exceptions propagate to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace apfa
