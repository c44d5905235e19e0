#pragma once

#include <functional>

namespace stbiholo {

/// Number of worker threads to use: STBI_THREADS env var if set (>0),
/// otherwise the hardware concurrency. Always at least 1.
int worker_count();

/// Runs fn(i) for i in [0, n) across worker threads with a static partition.
/// Results must be written to disjoint slots (index-addressed); the call
/// blocks until every index is done. Exceptions are rethrown on the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace stbiholo
