#pragma once

#include <cstddef>
#include <functional>

namespace diffractnet {

/// Worker count: DIFFRACTNET_THREADS when set (>= 1), else hardware
/// concurrency.
int worker_count();

/// Runs fn(i) for i in [0, count) across workers. Each index is processed
/// exactly once; callers own any ordering of result reduction.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace diffractnet
