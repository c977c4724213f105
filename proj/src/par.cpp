#include "dstlab/par.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <atomic>

namespace dst::par {

namespace {
std::atomic<int> g_threads{0}; // 0 = use the OpenMP default
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int current_threads() {
    int n = g_threads.load();
    return n > 0 ? std::min(n, max_threads()) : max_threads();
}

void set_threads(int n) { g_threads.store(n); }

void for_index(int n, const std::function<void(int)>& body) {
#ifdef _OPENMP
    const int nt = current_threads();
    if (nt > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (int i = 0; i < n; ++i) body(i);
}

} // namespace dst::par
