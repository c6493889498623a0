#pragma once

#include <functional>

#include "sparsemine/types.hpp"

namespace sparsemine {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
///
/// Work is split into contiguous chunks; results must be written to
/// per-index slots so output order never depends on scheduling. The first
/// exception thrown by any task is rethrown on the calling thread.
void parallel_for(Index n, unsigned jobs, const std::function<void(Index)>& fn);

}  // namespace sparsemine
