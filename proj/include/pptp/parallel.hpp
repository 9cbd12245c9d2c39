#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace pptp {

// Runs fn(i) for i in [0, count) across `threads` workers (0 = hardware
// concurrency). Rethrows the first exception after all workers join.
void parallel_for(size_t count, unsigned threads, const std::function<void(size_t)>& fn);

}  // namespace pptp
