#pragma once

#include <cstddef>
#include <functional>

namespace fsnet {

/// Worker threads to use: the FSNET_THREADS environment variable when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for every i in [0, n) on up to worker_count() threads. Work is
/// handed out by index, so results written to per-index slots do not depend on
/// the thread count. If any call throws, the exception from the lowest index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fsnet
