#pragma once

#include <cstddef>
#include <functional>

namespace tenscomp {

/// Worker count: hardware concurrency, capped by TENSCOMP_THREADS when set.
std::size_t thread_count();

/// Runs fn(0..n-1). Each index must write only its own output so the
/// result does not depend on the schedule. The first exception thrown by
/// any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tenscomp
