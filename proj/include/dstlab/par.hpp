#pragma once

// Thin wrapper over the OpenMP runtime. Every hot kernel goes through
// par::for_index so the whole library can be forced serial at runtime
// (tests compare serial vs parallel runs bit for bit).

#include <functional>

namespace dst::par {

int max_threads();
int current_threads();
void set_threads(int n); // n <= 1 forces serial execution

// Parallel loop over [0, n). The body must not touch shared mutable state
// except through disjoint indices; reductions stay serial on purpose so
// floating-point sums are deterministic.
void for_index(int n, const std::function<void(int)>& body);

} // namespace dst::par
