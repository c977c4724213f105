#include "dstlab/spectral_curve.hpp"

#include "dstlab/par.hpp"

#include <algorithm>
#include <cmath>

namespace dst {

std::array<cplx, 2> bloch_exponents(std::array<double, 2> k) {
    return {cplx(kPi * k[1], kPi * k[0]), cplx(-kPi * k[1], kPi * k[0])};
}

namespace {

struct ModeTable {
    int cutoff = 0, side = 0, M = 0;
    std::vector<cplx> sym_d, sym_dbar;

    ModeTable() = default;
    ModeTable(const TorusGrid& g, int cutoff_)
        : cutoff(cutoff_), side(2 * cutoff_ + 1), M(side * side) {
        sym_d.resize(static_cast<size_t>(M));
        sym_dbar.resize(static_cast<size_t>(M));
        for (int m2 = -cutoff; m2 <= cutoff; ++m2)
            for (int m1 = -cutoff; m1 <= cutoff; ++m1) {
                size_t id = idx(m1, m2);
                sym_d[id] = g.sym_d(m1, m2);
                sym_dbar[id] = g.sym_dbar(m1, m2);
            }
    }
    size_t idx(int m1, int m2) const {
        return static_cast<size_t>((m1 + cutoff) + side * (m2 + cutoff));
    }
    std::array<int, 2> mode(size_t id) const {
        int i = static_cast<int>(id);
        return {i % side - cutoff, i / side - cutoff};
    }
};

// convolution block: C(m, n) = Uhat(m - n); coefficients outside the dealias
// band of U are zero by construction.
la::Mat conv_block(const PeriodicField& U, const ModeTable& mt) {
    PeriodicField Ud = dealias(U);
    auto uh = to_modes(Ud);
    const auto& g = *U.grid;
    auto lookup = [&](int d1, int d2) -> cplx {
        if (std::abs(d1) > g.dealias_max1() || std::abs(d2) > g.dealias_max2()) return 0.0;
        return uh[static_cast<size_t>(wrap_index(d1, g.n1) + g.n1 * wrap_index(d2, g.n2))];
    };
    la::Mat C(mt.M, mt.M);
    for (int n2 = -mt.cutoff; n2 <= mt.cutoff; ++n2)
        for (int n1 = -mt.cutoff; n1 <= mt.cutoff; ++n1) {
            size_t col = mt.idx(n1, n2);
            for (int m2 = -mt.cutoff; m2 <= mt.cutoff; ++m2)
                for (int m1 = -mt.cutoff; m1 <= mt.cutoff; ++m1)
                    C.at(static_cast<int>(mt.idx(m1, m2)), static_cast<int>(col)) =
                        lookup(m1 - n1, m2 - n2);
        }
    return C;
}

la::Mat adjoint(const la::Mat& m) {
    la::Mat out(m.cols, m.rows);
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < m.rows; ++i) out.at(j, i) = std::conj(m.at(i, j));
    return out;
}

void check_cutoff(const TorusGrid& g, int cutoff) {
    if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
    if (cutoff > std::min(g.dealias_max1(), g.dealias_max2()))
        throw CutoffTooLarge("cutoff " + std::to_string(cutoff) +
                             " exceeds the alias-safe band of the grid");
}

} // namespace

la::Mat assemble_bloch_exponents(const PeriodicField& U, cplx lambda, cplx rho, int cutoff,
                                 bool vee) {
    check_cutoff(*U.grid, cutoff);
    ModeTable mt(*U.grid, cutoff);
    la::Mat CU = conv_block(U, mt);
    la::Mat CUa = adjoint(CU);
    const la::Mat& A = vee ? CUa : CU;  // eq1 x psi1
    const la::Mat& B = vee ? CU : CUa;  // eq2 x psi2
    const int M = mt.M;
    la::Mat out(2 * M, 2 * M);
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < M; ++i) {
            out.at(i, j) = A.at(i, j);
            out.at(M + i, M + j) = B.at(i, j);
        }
    for (int i = 0; i < M; ++i) {
        out.at(i, M + i) = mt.sym_d[static_cast<size_t>(i)] + lambda;
        out.at(M + i, i) = -(mt.sym_dbar[static_cast<size_t>(i)] + rho);
    }
    return out;
}

la::Mat assemble_bloch(const PeriodicField& U, std::array<double, 2> k, int cutoff, bool vee) {
    auto [l, r] = bloch_exponents(k);
    return assemble_bloch_exponents(U, l, r, cutoff, vee);
}

// ---------------------------------------------------------------------------
// Scanner
// ---------------------------------------------------------------------------

struct BlochScanner::Impl {
    GridPtr grid;
    ModeTable mt;
    la::Mat A, B;      // convolution blocks (eq1 x psi1, eq2 x psi2)
    bool use_schur = false;
    la::LU Alu;
    la::Mat W;         // A^{-1}
    double a_det_phase = 0.0;
    PeriodicField Ufield;
    bool vee = false;
    int cutoff = 0;

    std::vector<cplx> d1(cplx lambda) const {
        std::vector<cplx> d(static_cast<size_t>(mt.M));
        for (int i = 0; i < mt.M; ++i) d[static_cast<size_t>(i)] = mt.sym_d[static_cast<size_t>(i)] + lambda;
        return d;
    }
    std::vector<cplx> d2(cplx rho) const {
        std::vector<cplx> d(static_cast<size_t>(mt.M));
        for (int i = 0; i < mt.M; ++i) d[static_cast<size_t>(i)] = -(mt.sym_dbar[static_cast<size_t>(i)] + rho);
        return d;
    }

    // S = B - D2 W D1
    la::Mat schur(const std::vector<cplx>& dv1, const std::vector<cplx>& dv2) const {
        const int M = mt.M;
        la::Mat S(M, M);
        for (int j = 0; j < M; ++j) {
            const cplx dj = dv1[static_cast<size_t>(j)];
            const cplx* wc = W.col(j);
            const cplx* bc = B.col(j);
            cplx* sc = S.col(j);
            for (int i = 0; i < M; ++i) sc[i] = bc[i] - dv2[static_cast<size_t>(i)] * wc[i] * dj;
        }
        return S;
    }

    la::LinearOp full_op(const std::vector<cplx>& dv1, const std::vector<cplx>& dv2,
                         const la::LU& Slu) const {
        const int M = mt.M;
        la::LinearOp op;
        op.dim = 2 * M;
        op.apply = [this, dv1, dv2, M](std::span<const cplx> x) {
            std::vector<cplx> y(static_cast<size_t>(2 * M), 0.0);
            auto xa = x.subspan(0, static_cast<size_t>(M));
            auto xb = x.subspan(static_cast<size_t>(M), static_cast<size_t>(M));
            auto ya = la::matvec(A, xa);
            auto yb = la::matvec(B, xb);
            for (int i = 0; i < M; ++i) {
                y[static_cast<size_t>(i)] = ya[static_cast<size_t>(i)] + dv1[static_cast<size_t>(i)] * xb[static_cast<size_t>(i)];
                y[static_cast<size_t>(M + i)] = dv2[static_cast<size_t>(i)] * xa[static_cast<size_t>(i)] + yb[static_cast<size_t>(i)];
            }
            return y;
        };
        op.apply_adjoint = [this, dv1, dv2, M](std::span<const cplx> x) {
            std::vector<cplx> y(static_cast<size_t>(2 * M), 0.0);
            auto xa = x.subspan(0, static_cast<size_t>(M));
            auto xb = x.subspan(static_cast<size_t>(M), static_cast<size_t>(M));
            auto ya = la::matvec_adjoint(A, xa);
            auto yb = la::matvec_adjoint(B, xb);
            for (int i = 0; i < M; ++i) {
                y[static_cast<size_t>(i)] = ya[static_cast<size_t>(i)] + std::conj(dv2[static_cast<size_t>(i)]) * xb[static_cast<size_t>(i)];
                y[static_cast<size_t>(M + i)] = std::conj(dv1[static_cast<size_t>(i)]) * xa[static_cast<size_t>(i)] + yb[static_cast<size_t>(i)];
            }
            return y;
        };
        op.solve = [this, dv1, dv2, &Slu, M](std::span<cplx> x) {
            // x = W (r - D1 y), y = S^{-1} (s - D2 W r)
            std::vector<cplx> r(x.begin(), x.begin() + M);
            std::vector<cplx> s(x.begin() + M, x.end());
            auto wr = la::matvec(W, r);
            std::vector<cplx> rhs(static_cast<size_t>(M));
            for (int i = 0; i < M; ++i) rhs[static_cast<size_t>(i)] = s[static_cast<size_t>(i)] - dv2[static_cast<size_t>(i)] * wr[static_cast<size_t>(i)];
            Slu.solve(rhs);
            std::vector<cplx> tmp(static_cast<size_t>(M));
            for (int i = 0; i < M; ++i) tmp[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] - dv1[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i)];
            auto xa = la::matvec(W, tmp);
            for (int i = 0; i < M; ++i) {
                x[static_cast<size_t>(i)] = xa[static_cast<size_t>(i)];
                x[static_cast<size_t>(M + i)] = rhs[static_cast<size_t>(i)];
            }
        };
        op.solve_adjoint = [this, dv1, dv2, &Slu, M](std::span<cplx> x) {
            // M^H [x;y] = [r;s]: y = S^{-H}(s - conj(D1) W^H r), x = W^H (r - conj(D2) y)
            std::vector<cplx> r(x.begin(), x.begin() + M);
            std::vector<cplx> s(x.begin() + M, x.end());
            auto wr = la::matvec_adjoint(W, r);
            std::vector<cplx> rhs(static_cast<size_t>(M));
            for (int i = 0; i < M; ++i)
                rhs[static_cast<size_t>(i)] = s[static_cast<size_t>(i)] - std::conj(dv1[static_cast<size_t>(i)]) * wr[static_cast<size_t>(i)];
            Slu.solve_adjoint(rhs);
            std::vector<cplx> tmp(static_cast<size_t>(M));
            for (int i = 0; i < M; ++i)
                tmp[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] - std::conj(dv2[static_cast<size_t>(i)]) * rhs[static_cast<size_t>(i)];
            auto xa = la::matvec_adjoint(W, tmp);
            for (int i = 0; i < M; ++i) {
                x[static_cast<size_t>(i)] = xa[static_cast<size_t>(i)];
                x[static_cast<size_t>(M + i)] = rhs[static_cast<size_t>(i)];
            }
        };
        return op;
    }
};

BlochScanner::BlochScanner(const PeriodicField& U, int cutoff, bool vee)
    : impl_(std::make_unique<Impl>()) {
    check_cutoff(*U.grid, cutoff);
    impl_->grid = U.grid;
    impl_->mt = ModeTable(*U.grid, cutoff);
    impl_->Ufield = U;
    impl_->vee = vee;
    impl_->cutoff = cutoff;
    la::Mat CU = conv_block(U, impl_->mt);
    la::Mat CUa = adjoint(CU);
    impl_->A = vee ? std::move(CUa) : std::move(CU);
    impl_->B = adjoint(impl_->A);
    double scale = 0.0;
    for (const auto& x : impl_->A.a) scale = std::max(scale, std::abs(x));
    impl_->Alu = la::lu_factor(impl_->A);
    impl_->use_schur = scale > 0.0 && impl_->Alu.min_pivot > 1e-8 * std::max(scale, impl_->Alu.max_pivot);
    if (impl_->use_schur) {
        const int M = impl_->mt.M;
        impl_->W = la::Mat(M, M);
        std::vector<cplx> e(static_cast<size_t>(M));
        for (int j = 0; j < M; ++j) {
            std::fill(e.begin(), e.end(), cplx(0.0));
            e[static_cast<size_t>(j)] = 1.0;
            impl_->Alu.solve(e);
            for (int i = 0; i < M; ++i) impl_->W.at(i, j) = e[static_cast<size_t>(i)];
        }
        impl_->a_det_phase = impl_->Alu.det_phase();
    }
}

BlochScanner::~BlochScanner() = default;
BlochScanner::BlochScanner(BlochScanner&&) noexcept = default;

int BlochScanner::dim() const { return 2 * impl_->mt.M; }

double BlochScanner::det_phase(cplx lambda, cplx rho) const {
    if (impl_->use_schur) {
        auto dv1 = impl_->d1(lambda);
        auto dv2 = impl_->d2(rho);
        la::LU Slu = la::lu_factor(impl_->schur(dv1, dv2));
        return std::remainder(impl_->a_det_phase + Slu.det_phase(), kTwoPi);
    }
    la::Mat full = assemble_bloch_exponents(impl_->Ufield, lambda, rho, impl_->cutoff, impl_->vee);
    return la::lu_factor(std::move(full)).det_phase();
}

BlochScanner::Sigma BlochScanner::sigmas(cplx lambda, cplx rho, bool want_vector,
                                         bool want_second, bool want_max) const {
    Sigma out;
    if (impl_->use_schur) {
        auto dv1 = impl_->d1(lambda);
        auto dv2 = impl_->d2(rho);
        la::LU Slu = la::lu_factor(impl_->schur(dv1, dv2));
        la::LinearOp op = impl_->full_op(dv1, dv2, Slu);
        if (want_max) out.sigma_max = la::sigma_max(op);
        auto sm = la::sigma_min(op, want_second);
        out.sigma_min = sm.sigma;
        out.sigma2 = sm.sigma2;
        if (want_vector) out.right_vector = std::move(sm.right_vector);
        return out;
    }
    la::Mat full = assemble_bloch_exponents(impl_->Ufield, lambda, rho, impl_->cutoff, impl_->vee);
    la::LU lu = la::lu_factor(full);
    la::LinearOp op = la::dense_op(full, lu);
    if (want_max) out.sigma_max = la::sigma_max(op);
    auto sm = la::sigma_min(op, want_second);
    out.sigma_min = sm.sigma;
    out.sigma2 = sm.sigma2;
    if (want_vector) out.right_vector = std::move(sm.right_vector);
    return out;
}

// ---------------------------------------------------------------------------

double dispersion_residual(const PeriodicField& U, std::array<double, 2> k, int cutoff) {
    BlochScanner sc(U, cutoff);
    auto [l, r] = bloch_exponents(k);
    auto s = sc.sigmas(l, r);
    return s.sigma_min / (s.sigma_max + 1e-300);
}

ScanWindow dual_cell_window(const TorusGrid& g) {
    // dual lattice in k-space: vectors with k . gamma_j integral; for the
    // square fixture this is spacing 1/(2 pi)
    double s1 = 1.0 / std::abs(g.gamma1);
    double s2 = 1.0 / std::abs(g.gamma2);
    return {0.0, 0.0, s1, s2};
}

cplx floquet_multiplier(const TorusGrid&, std::array<double, 2> k, cplx gamma) {
    return std::polar(1.0, kTwoPi * (k[0] * gamma.real() + k[1] * gamma.imag()));
}

GaugedMultipliers multipliers_with_gauge(const SpectralSample& s, cplx a, const TorusGrid& g) {
    GaugedMultipliers out;
    out.mu = {s.mu1, s.mu2};
    out.mu_gauged = {s.mu1 * std::exp(-a * g.gamma1), s.mu2 * std::exp(-a * g.gamma2)};
    return out;
}

namespace {

double wrap_angle(double x) { return std::remainder(x, kTwoPi); }

} // namespace

ScanResult scan_zero_set(const PeriodicField& U, const ScanWindow& window,
                         const ScanOptions& opt) {
    BlochScanner sc(U, opt.cutoff);
    const int r1 = opt.resolution1, r2 = opt.resolution2;
    const double h1 = (window.k1_max - window.k1_min) / r1;
    const double h2 = (window.k2_max - window.k2_min) / r2;

    std::vector<double> phase(static_cast<size_t>(r1) * r2);
    par::for_index(r1 * r2, [&](int id) {
        int i = id % r1, j = id / r1;
        auto [l, r] = bloch_exponents({window.k1_min + h1 * i, window.k2_min + h2 * j});
        phase[static_cast<size_t>(id)] = sc.det_phase(l, r);
    });

    auto phase_at = [&](std::array<double, 2> k) {
        auto [l, r] = bloch_exponents(k);
        return sc.det_phase(l, r);
    };

    struct Edge { std::array<double, 2> a, b; };
    std::vector<Edge> flips;
    auto flip = [&](double pa, double pb) { return std::abs(wrap_angle(pb - pa)) > 0.5 * kPi; };
    for (int j = 0; j < r2; ++j)
        for (int i = 0; i < r1; ++i) {
            double p0 = phase[static_cast<size_t>(i + r1 * j)];
            double k1 = window.k1_min + h1 * i, k2 = window.k2_min + h2 * j;
            if (i + 1 < r1 && flip(p0, phase[static_cast<size_t>(i + 1 + r1 * j)]))
                flips.push_back({{k1, k2}, {k1 + h1, k2}});
            if (j + 1 < r2 && flip(p0, phase[static_cast<size_t>(i + r1 * (j + 1))]))
                flips.push_back({{k1, k2}, {k1, k2 + h2}});
        }

    // two extra halvings so accepted points sit well inside the sigma gate
    const int bisect_steps =
        std::max(1, static_cast<int>(std::ceil(-std::log2(opt.refine_fraction)))) + 2;
    // one scale for the whole window: sigma_max varies only at the percent
    // level across a dual cell and is used for thresholding alone
    auto [l00, r00] = bloch_exponents({window.k1_min, window.k2_min});
    const double scan_sigma_max = sc.sigmas(l00, r00).sigma_max;
    std::vector<SpectralSample> samples(flips.size());
    std::vector<char> keep(flips.size(), 0);
    par::for_index(static_cast<int>(flips.size()), [&](int e) {
        auto [ka, kb] = flips[static_cast<size_t>(e)];
        double pa = phase_at(ka), pb = phase_at(kb);
        for (int it = 0; it < bisect_steps; ++it) {
            std::array<double, 2> km{0.5 * (ka[0] + kb[0]), 0.5 * (ka[1] + kb[1])};
            double pm = phase_at(km);
            if (std::abs(wrap_angle(pm - pa)) >= std::abs(wrap_angle(pb - pm))) {
                kb = km;
                pb = pm;
            } else {
                ka = km;
                pa = pm;
            }
        }
        std::array<double, 2> k{0.5 * (ka[0] + kb[0]), 0.5 * (ka[1] + kb[1])};
        auto [l, r] = bloch_exponents(k);
        auto s = sc.sigmas(l, r, false, false, false);
        if (s.sigma_min < opt.threshold * scan_sigma_max) {
            SpectralSample sample;
            sample.k1 = k[0];
            sample.k2 = k[1];
            sample.sigma_min = s.sigma_min;
            sample.mu1 = floquet_multiplier(*U.grid, k, U.grid->gamma1);
            sample.mu2 = floquet_multiplier(*U.grid, k, U.grid->gamma2);
            samples[static_cast<size_t>(e)] = sample;
            keep[static_cast<size_t>(e)] = 1;
        }
    });

    ScanResult out;
    for (size_t e = 0; e < samples.size(); ++e)
        if (keep[e]) out.samples.push_back(samples[e]);
    std::sort(out.samples.begin(), out.samples.end(), [](const auto& a, const auto& b) {
        return a.k1 != b.k1 ? a.k1 < b.k1 : a.k2 < b.k2;
    });
    out.sigma_max = scan_sigma_max;
    out.empty_zero_set = out.samples.empty();
    return out;
}

// ---------------------------------------------------------------------------
// Nullspaces
// ---------------------------------------------------------------------------

namespace {

SpinorPair vector_to_spinor(const GridPtr& grid, const ModeTable& mt,
                            std::span<const cplx> vec, cplx lambda, cplx rho) {
    const auto& g = *grid;
    std::vector<cplx> m1(static_cast<size_t>(g.size()), 0.0), m2(m1);
    // deterministic phase: largest coefficient made real positive
    size_t best = 0;
    double bv = 0.0;
    for (size_t i = 0; i < vec.size(); ++i)
        if (std::abs(vec[i]) > bv) { bv = std::abs(vec[i]); best = i; }
    cplx rot = bv > 0.0 ? std::abs(vec[best]) / vec[best] : cplx(1.0);
    for (int id = 0; id < mt.M; ++id) {
        auto mm = mt.mode(static_cast<size_t>(id));
        size_t gi = static_cast<size_t>(wrap_index(mm[0], g.n1) + g.n1 * wrap_index(mm[1], g.n2));
        m1[gi] = rot * vec[static_cast<size_t>(id)];
        m2[gi] = rot * vec[static_cast<size_t>(mt.M + id)];
    }
    return SpinorPair(QPF(lambda, rho, from_modes(grid, m1)),
                      QPF(lambda, rho, from_modes(grid, m2)));
}

} // namespace

NullspaceResult nullspace_at_exponents(const PeriodicField& U, cplx lambda, cplx rho,
                                       int cutoff, bool vee) {
    BlochScanner sc(U, cutoff, vee);
    ModeTable mt(*U.grid, cutoff);
    auto s = sc.sigmas(lambda, rho, true, true);
    NullspaceResult out;
    out.sigma = s.sigma_min;
    out.gap_ratio = s.sigma2 / std::max(s.sigma_min, 1e-300);
    out.near_degenerate = out.gap_ratio < 10.0;
    out.spinor = vector_to_spinor(U.grid, mt, s.right_vector, lambda, rho);
    return out;
}

NullspaceResult floquet_nullspace(const PeriodicField& U, std::array<double, 2> k, int cutoff,
                                  double tol, bool vee) {
    double res = dispersion_residual(U, k, cutoff);
    if (res > tol)
        throw NotOnCurve("dispersion residual " + std::to_string(res) + " exceeds " +
                         std::to_string(tol));
    auto [l, r] = bloch_exponents(k);
    return nullspace_at_exponents(U, l, r, cutoff, vee);
}

// ---------------------------------------------------------------------------
// Torus-compatible family search (Nelder-Mead on G)
// ---------------------------------------------------------------------------

AdmissibleSearchResult find_admissible_exponents(const PeriodicField& U, cplx lambda0,
                                                 cplx rho0, int cutoff, double target_sigma) {
    BlochScanner sc(U, cutoff);
    auto eval = [&](std::array<double, 2> G) {
        cplx Gc(G[0], G[1]);
        return sc.sigmas(lambda0 + 0.5 * Gc, rho0 + 0.5 * std::conj(Gc)).sigma_min;
    };

    // Nelder-Mead in the G-plane
    std::array<std::array<double, 2>, 3> pts{{{0.0, 0.0}, {2e-3, 0.0}, {0.0, 2e-3}}};
    std::array<double, 3> val{};
    for (int i = 0; i < 3; ++i) val[static_cast<size_t>(i)] = eval(pts[static_cast<size_t>(i)]);
    auto order = [&]() {
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (val[static_cast<size_t>(b)] < val[static_cast<size_t>(a)]) {
                    std::swap(val[static_cast<size_t>(a)], val[static_cast<size_t>(b)]);
                    std::swap(pts[static_cast<size_t>(a)], pts[static_cast<size_t>(b)]);
                }
    };
    order();
    for (int it = 0; it < 240 && val[0] > target_sigma; ++it) {
        std::array<double, 2> cen{0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])};
        std::array<double, 2> refl{2.0 * cen[0] - pts[2][0], 2.0 * cen[1] - pts[2][1]};
        double fr = eval(refl);
        if (fr < val[0]) {
            std::array<double, 2> exp_{3.0 * cen[0] - 2.0 * pts[2][0], 3.0 * cen[1] - 2.0 * pts[2][1]};
            double fe = eval(exp_);
            if (fe < fr) { pts[2] = exp_; val[2] = fe; }
            else { pts[2] = refl; val[2] = fr; }
        } else if (fr < val[1]) {
            pts[2] = refl;
            val[2] = fr;
        } else {
            std::array<double, 2> con{0.5 * (cen[0] + pts[2][0]), 0.5 * (cen[1] + pts[2][1])};
            double fc = eval(con);
            if (fc < val[2]) { pts[2] = con; val[2] = fc; }
            else {
                for (int i = 1; i < 3; ++i) {
                    pts[static_cast<size_t>(i)] = {0.5 * (pts[0][0] + pts[static_cast<size_t>(i)][0]),
                                                   0.5 * (pts[0][1] + pts[static_cast<size_t>(i)][1])};
                    val[static_cast<size_t>(i)] = eval(pts[static_cast<size_t>(i)]);
                }
            }
        }
        order();
    }
    AdmissibleSearchResult out;
    cplx Gc(pts[0][0], pts[0][1]);
    out.lambda = lambda0 + 0.5 * Gc;
    out.rho = rho0 + 0.5 * std::conj(Gc);
    out.sigma = val[0];
    out.converged = val[0] <= target_sigma;
    return out;
}

WeierstrassData weierstrass_from_potential(const PeriodicField& U, cplx lambda0, cplx rho0,
                                           int cutoff, double amplitude, double target_sigma) {
    auto found = find_admissible_exponents(U, lambda0, rho0, cutoff, target_sigma);
    if (!found.converged)
        throw NotOnCurve("no torus-compatible kernel near the requested exponents; sigma = " +
                         std::to_string(found.sigma));
    auto npsi = nullspace_at_exponents(U, found.lambda, found.rho, cutoff, false);
    auto nphi = nullspace_at_exponents(U, -found.lambda, -found.rho, cutoff, true);

    auto scaled = [&](const SpinorPair& s) {
        double m = std::max(max_abs(s.c1.part), max_abs(s.c2.part));
        cplx f = amplitude / m;
        return SpinorPair(f * s.c1, f * s.c2);
    };
    WeierstrassData data{scaled(npsi.spinor), scaled(nphi.spinor), U};
    require_weierstrass_consistent(data);
    return data;
}

} // namespace dst
