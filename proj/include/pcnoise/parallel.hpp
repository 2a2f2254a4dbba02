#pragma once

#include <cstddef>
#include <functional>

namespace pcnoise {

// Number of workers to use when the caller asks for 0 ("all available").
std::size_t resolve_threads(std::size_t requested);

// Calls fn(i) for every i in [0, n) using up to `threads` workers with
// contiguous static chunks. The first exception thrown by any worker is
// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pcnoise
