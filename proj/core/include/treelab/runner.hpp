#pragma once

#include <cstdint>
#include <functional>

namespace treelab {

// Worker count from TREELAB_WORKERS, else the hardware concurrency.
int default_worker_count();

// Runs fn(0..trials-1) across `workers` threads. Trials must be independent
// and write only to their own slot; results are then identical for any
// worker count. The first exception thrown by a trial is rethrown.
void for_each_trial(std::uint64_t trials, int workers,
                    const std::function<void(std::uint64_t)>& fn);

}  // namespace treelab
