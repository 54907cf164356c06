// Deterministic parallel_for. Work is split into fixed index ranges, so the
// result of any computation that only writes its own range is identical for
// every worker count.
#pragma once

#include <cstddef>
#include <functional>

namespace bcn {

// 0 = pick from BLOCKCNN_THREADS env, falling back to hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Calls fn(begin, end) on disjoint index ranges covering [0, n).
// Ranges and their assignment to slots do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace bcn
