#pragma once

// Index-based worker pool for Monte Carlo trial loops. Each index is
// processed exactly once and callers store results into preallocated slots,
// so aggregates do not depend on scheduling order or worker count.

#include <functional>

namespace invlearn {

void parallel_for_index(int count, int workers, const std::function<void(int)>& fn);

}
