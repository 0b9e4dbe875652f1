#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fbl {

// Worker count: hardware concurrency capped by the FBL_THREADS env var.
unsigned worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Each index
// writes its own slot, so reductions over the results are schedule-independent.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace fbl
