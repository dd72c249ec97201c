#pragma once

#include <cstddef>
#include <functional>

namespace lpconc {

/// Worker count from LPCONC_WORKERS, else hardware concurrency (at least 1).
int default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = default).
/// Callers write results into per-index slots and reduce in index order, so
/// output never depends on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace lpconc
