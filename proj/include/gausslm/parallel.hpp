#pragma once

#include <cstdint>
#include <functional>

namespace gausslm {

/// Worker count: hardware concurrency, capped by GAUSSLM_THREADS when set.
int worker_count();

/// Runs body(0..tasks-1) on up to worker_count() threads. Each task index is
/// visited exactly once; callers write results into per-task slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::int64_t tasks, const std::function<void(std::int64_t)>& body);

}  // namespace gausslm
