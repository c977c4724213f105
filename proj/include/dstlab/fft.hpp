#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dst::fftcore {

using cplx = std::complex<double>;

// In-place unnormalized transform: forward uses e^{-2pi i jm/n}.
// Power-of-two lengths take the radix-2 path, anything else falls back to
// a direct O(n^2) transform (grids here are small and mostly 2^k).
void fft(std::span<cplx> a, bool inverse);

// 2D transform of row-major data (n1 contiguous per row), rows then columns.
void fft2d(cplx* data, int n1, int n2, bool inverse);

// Direct DFT, kept as the serial reference the fast path is tested against.
std::vector<cplx> dft_reference(std::span<const cplx> a, bool inverse);

} // namespace dst::fftcore
