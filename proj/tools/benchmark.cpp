// Compares the OpenMP kernels against serial execution: batched 2D FFT,
// dealiased products, the LU factorization behind the Bloch scanner, and a
// small spectral scan. Run with the thread count of interest, e.g.
//   OMP_NUM_THREADS=8 ./dstlab_benchmark

#include "dstlab/fft.hpp"
#include "dstlab/par.hpp"
#include "dstlab/spectral_curve.hpp"
#include "dstlab/torus_field.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace dst;

namespace {

double time_ms(const std::function<void()>& body, int reps) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) body();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
    const int threads = par::max_threads();
    std::printf("dstlab benchmark, %d thread(s) available\n\n", threads);

    GridPtr grid = make_lattice(kTwoPi, cplx(0.0, kTwoPi), 64, 64);
    PeriodicField f = random_band_limited(grid, 16, 1.0, 1);
    PeriodicField g = random_band_limited(grid, 16, 1.0, 2);

    auto bench = [&](const char* name, const std::function<void()>& body, int reps) {
        par::set_threads(1);
        double s = time_ms(body, reps);
        par::set_threads(threads);
        double p = time_ms(body, reps);
        report(name, s, p);
    };

    bench("fft 64x64 roundtrip", [&] { from_modes(grid, to_modes(f)); }, 200);
    bench("dealiased product 64x64", [&] { product(f, g); }, 100);
    bench("derivative d^3 64x64", [&] { derivative(f, Der::d, 3); }, 200);

    PeriodicField U(grid, cplx(0.5, 0.0));
    bench("bloch det phase, cutoff 8", [&] {
        BlochScanner sc(U, 8);
        auto [l, r] = bloch_exponents({0.05, 0.05});
        sc.det_phase(l, r);
    }, 5);

    ScanOptions opt;
    opt.resolution1 = opt.resolution2 = 16;
    opt.cutoff = 8;
    ScanWindow w = dual_cell_window(*grid);
    bench("spectral scan 16x16", [&] { scan_zero_set(U, w, opt); }, 1);

    par::set_threads(0);
    return 0;
}
