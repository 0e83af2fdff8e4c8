#pragma once

#include <cstddef>
#include <functional>

namespace morphcloud {

// Thread budget: MORPHCLOUD_THREADS env var if set (>=1), else hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [begin, end) on up to thread_budget() threads using a static
// block partition. Callers must make fn(i) write only to slot i-owned state; results
// are then independent of the thread count, keeping pipelines deterministic. If any
// fn(i) throws, all workers still finish their blocks and the exception from the
// lowest-indexed failing block is rethrown.
void parallel_for(size_t begin, size_t end, const std::function<void(size_t)>& fn);

} // namespace morphcloud
