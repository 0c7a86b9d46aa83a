#pragma once

#include <cstddef>
#include <functional>

namespace fspace::parallel {

// Number of worker threads used by parallel_for. Defaults to the FSPACE_THREADS
// environment variable, or 1 when unset.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for every i in [0, n). Each index must write only its own
// output slot; reductions over those slots happen afterwards in fixed order,
// so results never depend on the thread count. The first exception thrown by
// any body is rethrown on the calling thread. Calls made from inside a body
// run serially on that thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fspace::parallel
