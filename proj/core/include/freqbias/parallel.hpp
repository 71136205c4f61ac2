#pragma once

#include <cstddef>
#include <functional>

namespace freqbias {

/// Number of worker threads to use: `requested` if positive, otherwise the
/// hardware concurrency (at least 1).
int resolve_workers(int requested);

/// Runs body(i) for i in [0, n) on up to `workers` threads with a static
/// block partition. Callers get determinism by making body(i) depend only on
/// i (per-index derived seeds, results written by index); the partition never
/// influences results. The first exception thrown (lowest block) is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace freqbias
