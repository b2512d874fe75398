#pragma once

#include <cstddef>
#include <functional>

namespace sbridge {

// Worker cap from SBRIDGE_THREADS; 1 when unset or invalid.
std::size_t thread_budget();

// Runs body(0..count-1) on up to thread_budget() threads. Each index is
// visited once; the first exception (by index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sbridge
