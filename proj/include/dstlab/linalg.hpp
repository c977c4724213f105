#pragma once

// Small dense complex linear algebra: column-major matrices, partially
// pivoted LU, and power / inverse iteration for extreme singular values.
// Sized for the truncated Bloch matrices (a few hundred rows), so plain
// O(n^3) kernels are enough.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dst::la {

using cplx = std::complex<double>;

struct Mat {
    int rows = 0, cols = 0;
    std::vector<cplx> a; // column-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    cplx& at(int i, int j) { return a[static_cast<size_t>(i) + static_cast<size_t>(rows) * j]; }
    cplx at(int i, int j) const { return a[static_cast<size_t>(i) + static_cast<size_t>(rows) * j]; }
    cplx* col(int j) { return a.data() + static_cast<size_t>(rows) * j; }
    const cplx* col(int j) const { return a.data() + static_cast<size_t>(rows) * j; }
};

std::vector<cplx> matvec(const Mat& m, std::span<const cplx> x);
std::vector<cplx> matvec_adjoint(const Mat& m, std::span<const cplx> x);

struct LU {
    int n = 0;
    Mat f;                 // packed L\U factors
    std::vector<int> piv;  // row swaps
    int swap_sign = 1;
    double min_pivot = 0.0, max_pivot = 0.0;

    void solve(std::span<cplx> x) const;          // A x = b in place
    void solve_adjoint(std::span<cplx> x) const;  // A^H x = b in place
    double log_abs_det() const;
    double det_phase() const; // arg(det A) in (-pi, pi]
};

// Near-zero pivots are nudged to a tiny multiple of the matrix scale so the
// factorization of (numerically) singular matrices still supports inverse
// iteration.
LU lu_factor(Mat m);

// Operator interface for the iterative singular-value routines.
struct LinearOp {
    int dim = 0;
    std::function<std::vector<cplx>(std::span<const cplx>)> apply;         // A x
    std::function<std::vector<cplx>(std::span<const cplx>)> apply_adjoint; // A^H x
    std::function<void(std::span<cplx>)> solve;                            // x <- A^{-1} x
    std::function<void(std::span<cplx>)> solve_adjoint;                    // x <- A^{-H} x
};

LinearOp dense_op(const Mat& m, const LU& lu);

// power iteration on A^H A; linear convergence, adequate for thresholds
double sigma_max(const LinearOp& op, int iters = 60, std::uint64_t seed = 1);

struct SigmaMin {
    double sigma = 0.0;
    double sigma2 = 0.0; // next singular value (deflated estimate)
    std::vector<cplx> right_vector;
};
SigmaMin sigma_min(const LinearOp& op, bool want_second = false, int iters = 40,
                   std::uint64_t seed = 2);

double norm2(std::span<const cplx> x);
void normalize(std::span<cplx> x);
cplx dot(std::span<const cplx> a, std::span<const cplx> b); // conj(a) . b

} // namespace dst::la
