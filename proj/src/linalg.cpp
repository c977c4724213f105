#include "dstlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dst::la {

std::vector<cplx> matvec(const Mat& m, std::span<const cplx> x) {
    std::vector<cplx> y(static_cast<size_t>(m.rows), 0.0);
    for (int j = 0; j < m.cols; ++j) {
        const cplx xj = x[static_cast<size_t>(j)];
        if (xj == 0.0) continue;
        const cplx* c = m.col(j);
        for (int i = 0; i < m.rows; ++i) y[static_cast<size_t>(i)] += c[i] * xj;
    }
    return y;
}

std::vector<cplx> matvec_adjoint(const Mat& m, std::span<const cplx> x) {
    std::vector<cplx> y(static_cast<size_t>(m.cols), 0.0);
    for (int j = 0; j < m.cols; ++j) {
        const cplx* c = m.col(j);
        cplx acc = 0.0;
        for (int i = 0; i < m.rows; ++i) acc += std::conj(c[i]) * x[static_cast<size_t>(i)];
        y[static_cast<size_t>(j)] = acc;
    }
    return y;
}

LU lu_factor(Mat m) {
    LU lu;
    lu.n = m.rows;
    const int n = lu.n;
    lu.piv.resize(static_cast<size_t>(n));
    double scale = 0.0;
    for (const auto& x : m.a) scale = std::max(scale, std::abs(x));
    const double tiny = std::max(scale, 1.0) * 1e-150;

    for (int k = 0; k < n; ++k) {
        cplx* ck = m.col(k);
        int p = k;
        double best = std::abs(ck[k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(ck[i]);
            if (v > best) { best = v; p = i; }
        }
        lu.piv[static_cast<size_t>(k)] = p;
        if (p != k) {
            lu.swap_sign = -lu.swap_sign;
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
        }
        cplx pivot = ck[k];
        double ap = std::abs(pivot);
        if (ap < tiny) {
            pivot = tiny; // keep solves usable for inverse iteration
            ck[k] = pivot;
            ap = tiny;
        }
        if (k == 0) { lu.min_pivot = lu.max_pivot = ap; }
        lu.min_pivot = std::min(lu.min_pivot, ap);
        lu.max_pivot = std::max(lu.max_pivot, ap);
        const cplx inv = 1.0 / pivot;
        for (int i = k + 1; i < n; ++i) ck[i] *= inv;
        for (int j = k + 1; j < n; ++j) {
            cplx* cj = m.col(j);
            const cplx mult = cj[k];
            if (mult == 0.0) continue;
            for (int i = k + 1; i < n; ++i) cj[i] -= ck[i] * mult;
        }
    }
    lu.f = std::move(m);
    return lu;
}

void LU::solve(std::span<cplx> x) const {
    for (int k = 0; k < n; ++k) {
        int p = piv[static_cast<size_t>(k)];
        if (p != k) std::swap(x[static_cast<size_t>(k)], x[static_cast<size_t>(p)]);
    }
    // L y = b (unit diagonal)
    for (int j = 0; j < n; ++j) {
        const cplx xj = x[static_cast<size_t>(j)];
        if (xj == 0.0) continue;
        const cplx* c = f.col(j);
        for (int i = j + 1; i < n; ++i) x[static_cast<size_t>(i)] -= c[i] * xj;
    }
    // U x = y
    for (int j = n - 1; j >= 0; --j) {
        const cplx* c = f.col(j);
        x[static_cast<size_t>(j)] /= c[j];
        const cplx xj = x[static_cast<size_t>(j)];
        for (int i = 0; i < j; ++i) x[static_cast<size_t>(i)] -= c[i] * xj;
    }
}

void LU::solve_adjoint(std::span<cplx> x) const {
    // A^H = (P^T L U)^H = U^H L^H P
    // U^H y = x (lower triangular with conj diag)
    for (int j = 0; j < n; ++j) {
        const cplx* c = f.col(j);
        cplx acc = x[static_cast<size_t>(j)];
        for (int i = 0; i < j; ++i) acc -= std::conj(c[i]) * x[static_cast<size_t>(i)];
        x[static_cast<size_t>(j)] = acc / std::conj(c[j]);
    }
    // L^H z = y (upper triangular, unit diag)
    for (int j = n - 1; j >= 0; --j) {
        const cplx* c = f.col(j);
        cplx acc = x[static_cast<size_t>(j)];
        for (int i = j + 1; i < n; ++i) acc -= std::conj(c[i]) * x[static_cast<size_t>(i)];
        x[static_cast<size_t>(j)] = acc;
    }
    // undo pivoting: x <- P^T x applied in reverse
    for (int k = n - 1; k >= 0; --k) {
        int p = piv[static_cast<size_t>(k)];
        if (p != k) std::swap(x[static_cast<size_t>(k)], x[static_cast<size_t>(p)]);
    }
}

double LU::log_abs_det() const {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::log(std::abs(f.at(k, k)));
    return s;
}

double LU::det_phase() const {
    double ph = swap_sign < 0 ? 3.14159265358979323846 : 0.0;
    for (int k = 0; k < n; ++k) ph += std::arg(f.at(k, k));
    return std::remainder(ph, 2.0 * 3.14159265358979323846);
}

LinearOp dense_op(const Mat& m, const LU& lu) {
    LinearOp op;
    op.dim = m.rows;
    op.apply = [&m](std::span<const cplx> x) { return matvec(m, x); };
    op.apply_adjoint = [&m](std::span<const cplx> x) { return matvec_adjoint(m, x); };
    op.solve = [&lu](std::span<cplx> x) { lu.solve(x); };
    op.solve_adjoint = [&lu](std::span<cplx> x) { lu.solve_adjoint(x); };
    return op;
}

double norm2(std::span<const cplx> x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

void normalize(std::span<cplx> x) {
    double n = norm2(x);
    if (n == 0.0) return;
    for (auto& v : x) v /= n;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

namespace {
std::vector<cplx> random_unit(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> x(static_cast<size_t>(n));
    for (auto& v : x) v = cplx(u(rng), u(rng));
    normalize(x);
    return x;
}
} // namespace

double sigma_max(const LinearOp& op, int iters, std::uint64_t seed) {
    auto x = random_unit(op.dim, seed);
    double sig = 0.0;
    for (int it = 0; it < iters; ++it) {
        auto y = op.apply(x);
        auto z = op.apply_adjoint(y);
        double nz = norm2(z);
        if (nz == 0.0) return 0.0;
        for (auto& v : z) v /= nz;
        double next = std::sqrt(nz); // |A^H A x| -> sigma^2
        x = std::move(z);
        if (it > 3 && std::abs(next - sig) <= 1e-12 * std::max(1.0, sig)) { sig = next; break; }
        sig = next;
    }
    return sig;
}

SigmaMin sigma_min(const LinearOp& op, bool want_second, int iters, std::uint64_t seed) {
    SigmaMin out;
    auto iterate = [&](const std::vector<cplx>* deflate) {
        auto x = random_unit(op.dim, seed + (deflate ? 7 : 0));
        if (deflate) {
            cplx c = dot(*deflate, x);
            for (size_t i = 0; i < x.size(); ++i) x[i] -= c * (*deflate)[i];
            normalize(x);
        }
        double prev = -1.0;
        for (int it = 0; it < iters; ++it) {
            // normalize between the two solves so near-singular growth cannot
            // overflow the squared norm
            std::vector<cplx> y(x);
            op.solve_adjoint(y);
            double n1 = norm2(y);
            if (!(n1 > 0.0) || !std::isfinite(n1)) break;
            for (auto& v : y) v /= n1;
            op.solve(y);
            double n2 = norm2(y);
            if (!(n2 > 0.0) || !std::isfinite(n2)) break;
            for (auto& v : y) v /= n2;
            if (deflate) {
                cplx c = dot(*deflate, y);
                for (size_t i = 0; i < y.size(); ++i) y[i] -= c * (*deflate)[i];
                normalize(y);
            }
            x = std::move(y);
            double sig = 1.0 / std::sqrt(n1 * n2);
            if (prev >= 0.0 && std::abs(sig - prev) <= 1e-10 * std::max(prev, 1e-300)) { prev = sig; break; }
            prev = sig;
        }
        // Rayleigh-style estimate from a true matvec
        auto ax = op.apply(x);
        double sig = norm2(ax) / std::max(norm2(x), 1e-300);
        return std::pair<double, std::vector<cplx>>(sig, std::move(x));
    };

    auto [s1, v1] = iterate(nullptr);
    out.sigma = s1;
    out.right_vector = v1;
    if (want_second) {
        auto [s2, v2] = iterate(&out.right_vector);
        out.sigma2 = s2;
    }
    return out;
}

} // namespace dst::la
