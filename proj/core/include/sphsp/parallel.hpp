#pragma once

#include <cstddef>
#include <functional>

namespace sphsp {

/// Number of worker threads used by per-pixel loops. 0 means hardware
/// concurrency. Results never depend on this value: parallel loops only
/// run independent per-item work, reductions stay sequential.
void set_thread_count(int threads);
int thread_count();

/// Calls body(begin, end) over disjoint sub-ranges of [0, n).
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sphsp
