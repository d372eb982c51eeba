#pragma once

#include "stkde/types.hpp"

#include <functional>

namespace stkde {

/// Runs fn(begin, end) over a partition of [0, n) using up to `workers`
/// threads (sequentially when workers <= 1). fn must only write state that is
/// disjoint per index, so results cannot depend on the worker count.
/// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(Index n, int workers, const std::function<void(Index, Index)>& fn);

}  // namespace stkde
