#pragma once

#include <cstddef>
#include <functional>

namespace sphrecon {

/// Number of worker threads used by parallel_for. 0 selects
/// std::thread::hardware_concurrency(). Defaults to 1.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(i) for every i in [begin, end), splitting the range into
/// contiguous static chunks. Callers must only write to per-index slots so the
/// result does not depend on the thread count. Calls made from inside a worker
/// run sequentially. If several indices throw, the exception of the lowest
/// failing chunk is rethrown.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace sphrecon
