#pragma once

#include <cstddef>
#include <functional>

namespace ffsrm {

// Worker count: FFSRM_THREADS if set (>=1), otherwise hardware concurrency.
int thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker. Results must not depend on the block boundaries; callers keep
// determinism by writing to disjoint outputs and combining in index order.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace ffsrm
