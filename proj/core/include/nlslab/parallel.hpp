#pragma once

#include <cstddef>
#include <functional>

namespace nlslab {

/// Worker count: hardware concurrency, capped by the NLSLAB_THREADS
/// environment variable when it holds a positive integer.
unsigned thread_budget();

/// Runs body(i) for i in [0, count) on up to thread_budget() threads. Each
/// index is processed exactly once; the first exception thrown is rethrown
/// after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nlslab
