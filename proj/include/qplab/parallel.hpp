#pragma once

#include <functional>

namespace qplab {

// Width used by data-parallel grid sweeps. Results never depend on it:
// every index is computed independently and reductions run in index order.
void set_threads(int n);
int threads();

void parallel_for(long long n, const std::function<void(long long)>& body);

}  // namespace qplab
