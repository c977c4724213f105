#include "dstlab/fft.hpp"

#include "dstlab/par.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace dst::fftcore {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Twiddle table for the forward transform of size n: w[k] = e^{-2pi i k/n}.
const std::vector<cplx>& twiddles(int n) {
    static std::mutex mtx;
    static std::unordered_map<int, std::vector<cplx>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> w(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double ang = -kTwoPi * k / n;
        w[static_cast<size_t>(k)] = cplx(std::cos(ang), std::sin(ang));
    }
    return cache.emplace(n, std::move(w)).first->second;
}

void fft_radix2(std::span<cplx> a, bool inverse) {
    const int n = static_cast<int>(a.size());
    // bit reversal
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
    }
    const auto& w = twiddles(n);
    for (int len = 2; len <= n; len <<= 1) {
        const int step = n / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                cplx tw = w[static_cast<size_t>(k * step)];
                if (inverse) tw = std::conj(tw);
                cplx u = a[static_cast<size_t>(i + k)];
                cplx t = a[static_cast<size_t>(i + k + len / 2)] * tw;
                a[static_cast<size_t>(i + k)] = u + t;
                a[static_cast<size_t>(i + k + len / 2)] = u - t;
            }
        }
    }
}

void dft_direct(std::span<cplx> a, bool inverse) {
    auto out = dft_reference(a, inverse);
    std::copy(out.begin(), out.end(), a.begin());
}

} // namespace

std::vector<cplx> dft_reference(std::span<const cplx> a, bool inverse) {
    const int n = static_cast<int>(a.size());
    std::vector<cplx> out(static_cast<size_t>(n));
    const double sgn = inverse ? 1.0 : -1.0;
    for (int m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double ang = sgn * kTwoPi * m * j / n;
            acc += a[static_cast<size_t>(j)] * cplx(std::cos(ang), std::sin(ang));
        }
        out[static_cast<size_t>(m)] = acc;
    }
    return out;
}

void fft(std::span<cplx> a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(static_cast<int>(a.size())))
        fft_radix2(a, inverse);
    else
        dft_direct(a, inverse);
}

void fft2d(cplx* data, int n1, int n2, bool inverse) {
    if (n1 > 1) {
        par::for_index(n2, [&](int j2) {
            fft(std::span<cplx>(data + static_cast<size_t>(j2) * n1, static_cast<size_t>(n1)), inverse);
        });
    }
    if (n2 > 1) {
        par::for_index(n1, [&](int j1) {
            std::vector<cplx> col(static_cast<size_t>(n2));
            for (int j2 = 0; j2 < n2; ++j2) col[static_cast<size_t>(j2)] = data[j1 + static_cast<size_t>(j2) * n1];
            fft(col, inverse);
            for (int j2 = 0; j2 < n2; ++j2) data[j1 + static_cast<size_t>(j2) * n1] = col[static_cast<size_t>(j2)];
        });
    }
}

} // namespace dst::fftcore
