#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dstlab/spectral_curve.hpp"
#include "dstlab/weierstrass.hpp"

#include <cmath>

using namespace dst;

namespace {

GridPtr square(int n = 32) { return make_lattice(kTwoPi, cplx(0.0, kTwoPi), n, n); }

// distance of kappa = 2 pi k from the folded circle |kappa + m| = r
double circle_distance(std::array<double, 2> k, double radius) {
    double best = 1e300;
    for (int m2 = -2; m2 <= 2; ++m2)
        for (int m1 = -2; m1 <= 2; ++m1) {
            double kx = kTwoPi * k[0] + m1, ky = kTwoPi * k[1] + m2;
            best = std::min(best, std::abs(std::hypot(kx, ky) - radius));
        }
    return best;
}

} // namespace

TEST_CASE("bloch exponents match the Floquet convention") {
    auto [l, r] = bloch_exponents({0.3, -0.2});
    CHECK(std::abs(l - cplx(kPi * -0.2, kPi * 0.3)) < 1e-15);
    CHECK(std::abs(r - cplx(-kPi * -0.2, kPi * 0.3)) < 1e-15);
    // multiplier over gamma agrees with exp(lambda gamma + rho conj gamma)
    auto g = square();
    QPF f(l, r, PeriodicField(g, 1.0));
    cplx mu = floquet_multiplier(*g, {0.3, -0.2}, g->gamma1);
    CHECK(std::abs(f.multiplier(g->gamma1) - mu) < 1e-12);
}

TEST_CASE("free Dirac: block diagonal, zero exactly at shifted symbols") {
    auto g = square();
    PeriodicField zero(g);
    CHECK(dispersion_residual(zero, {0.0, 0.0}, 4) < 1e-12);
    // generic k away from the free zero set
    CHECK(dispersion_residual(zero, {0.031, 0.017}, 4) > 1e-4);
}

TEST_CASE("constant potential: dispersion circle |kappa| = 2|U|") {
    auto g = square();
    PeriodicField U(g, 0.5);
    // kappa = (1, 0) lies on the circle of radius 1: k = (1/2pi, 0)
    CHECK(dispersion_residual(U, {1.0 / kTwoPi, 0.0}, 8) < 1e-8);
    // kappa = (0.5, 0) is 0.118 away from the folded circle
    CHECK(dispersion_residual(U, {0.5 / kTwoPi, 0.0}, 8) > 1e-3);
}

namespace {

// golden-section refinement of the zero set along the ray of angle t
std::array<double, 2> on_curve_point(const PeriodicField& U, double t, int cutoff,
                                     double r_lo = 0.7, double r_hi = 1.2) {
    auto eval = [&](double r) {
        std::array<double, 2> k{r * std::cos(t) / kTwoPi, r * std::sin(t) / kTwoPi};
        return dispersion_residual(U, k, cutoff);
    };
    const double gr = 0.6180339887498949;
    double a = r_lo, b = r_hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 48; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = eval(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = eval(x2);
        }
    }
    double r = 0.5 * (a + b);
    return {r * std::cos(t) / kTwoPi, r * std::sin(t) / kTwoPi};
}

} // namespace

TEST_CASE("sigma is symmetric under k -> -k for real potentials") {
    auto g = square();
    std::pair<std::array<int, 2>, cplx> entry{{1, 1}, 0.08};
    PeriodicField U = PeriodicField(g, 0.45) + field_from_mode_list(g, std::span(&entry, 1));
    U += conj_field(field_from_mode_list(g, std::span(&entry, 1)));
    // compare on the zero set, where the residual carries the information
    for (double t : {0.35, 1.9}) {
        auto k = on_curve_point(U, t, 6);
        double a = dispersion_residual(U, k, 6);
        double b = dispersion_residual(U, {-k[0], -k[1]}, 6);
        CHECK(a < 1e-10);
        CHECK(std::abs(a - b) < 1e-10);
    }
}

TEST_CASE("dual-lattice periodicity of the dispersion residual") {
    auto g = square();
    // a real perturbation keeps the real-quasimomentum slice of the zero set
    // one-dimensional, so the ray refinement lands on the curve
    std::vector<std::pair<std::array<int, 2>, cplx>> entries{{{1, 0}, 0.02}, {{-1, 0}, 0.02}};
    PeriodicField U = PeriodicField(g, 0.5) + field_from_mode_list(g, entries);
    auto k = on_curve_point(U, 0.35, 8, 0.9, 1.1);
    std::array<double, 2> kshift{k[0] + 1.0 / kTwoPi, k[1]};
    double a = dispersion_residual(U, k, 8);
    double b = dispersion_residual(U, kshift, 8);
    CHECK(a < 1e-10);
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("cutoff convergence for a smooth potential") {
    auto g = square();
    std::pair<std::array<int, 2>, cplx> entry{{1, 1}, cplx(0.03, -0.01)};
    PeriodicField U = PeriodicField(g, 0.5) + field_from_mode_list(g, std::span(&entry, 1));
    std::array<double, 2> k{0.05, 0.02};
    BlochScanner s6(U, 5), s10(U, 10);
    auto [l, r] = bloch_exponents(k);
    double a = s6.sigmas(l, r).sigma_min;
    double b = s10.sigmas(l, r).sigma_min;
    CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("schur path and dense assembly agree") {
    auto g = square();
    std::pair<std::array<int, 2>, cplx> entry{{1, 0}, cplx(0.1, 0.05)};
    PeriodicField U = PeriodicField(g, cplx(0.4, 0.2)) + field_from_mode_list(g, std::span(&entry, 1));
    std::array<double, 2> k{0.04, -0.03};
    auto [l, r] = bloch_exponents(k);
    BlochScanner sc(U, 5); // Schur path (constant block dominates)
    auto s = sc.sigmas(l, r);
    la::Mat full = assemble_bloch(U, k, 5);
    la::LU lu = la::lu_factor(full);
    la::LinearOp op = la::dense_op(full, lu);
    double smax = la::sigma_max(op);
    double smin = la::sigma_min(op).sigma;
    CHECK(std::abs(s.sigma_max - smax) < 1e-8 * smax);
    CHECK(std::abs(s.sigma_min - smin) < 1e-8 * std::max(smin, 1e-12));
}

TEST_CASE("cutoff too large is rejected") {
    auto g = square(16); // dealias band 5
    PeriodicField U(g, 0.5);
    CHECK_THROWS_AS(assemble_bloch(U, {0.0, 0.0}, 6), CutoffTooLarge);
    CHECK_THROWS_AS(BlochScanner(U, 6), CutoffTooLarge);
}

TEST_CASE("scan traces the constant-potential circle") {
    auto g = square();
    PeriodicField U(g, 0.5);
    ScanOptions opt;
    opt.resolution1 = opt.resolution2 = 20;
    opt.cutoff = 8;
    ScanResult res = scan_zero_set(U, dual_cell_window(*g), opt);
    CHECK_FALSE(res.empty_zero_set);
    CHECK(res.samples.size() > 40);
    const double cell_kappa = kTwoPi * (1.0 / kTwoPi) / 20.0; // one scan cell in kappa units
    double worst = 0.0, mu_dev = 0.0;
    for (const auto& s : res.samples) {
        worst = std::max(worst, circle_distance({s.k1, s.k2}, 1.0));
        mu_dev = std::max({mu_dev, std::abs(std::abs(s.mu1) - 1.0), std::abs(std::abs(s.mu2) - 1.0)});
    }
    CHECK(worst < cell_kappa);
    CHECK(mu_dev < 1e-10);
}

TEST_CASE("scan of the free operator finds the shifted symbol zeros") {
    auto g = square();
    PeriodicField zero(g);
    ScanOptions opt;
    opt.resolution1 = opt.resolution2 = 12;
    opt.cutoff = 3;
    ScanResult res = scan_zero_set(zero, dual_cell_window(*g), opt);
    // zeros sit where kappa + m = 0, i.e. at dual lattice points of the window
    for (const auto& s : res.samples)
        CHECK(circle_distance({s.k1, s.k2}, 0.0) < 0.05);
}

TEST_CASE("empty window reports an empty zero set") {
    auto g = square();
    PeriodicField U(g, 0.5);
    ScanOptions opt;
    opt.resolution1 = opt.resolution2 = 8;
    opt.cutoff = 8;
    // a window strictly inside the circle: radius 1 circle stays far away
    ScanWindow w{0.030, 0.030, 0.045, 0.045};
    ScanResult res = scan_zero_set(U, w, opt);
    CHECK(res.empty_zero_set);
}

TEST_CASE("multiplier gauge action") {
    auto g = square();
    SpectralSample s;
    s.k1 = 0.07;
    s.k2 = -0.02;
    s.mu1 = floquet_multiplier(*g, {s.k1, s.k2}, g->gamma1);
    s.mu2 = floquet_multiplier(*g, {s.k1, s.k2}, g->gamma2);
    GaugedMultipliers gm0 = multipliers_with_gauge(s, 0.0, *g);
    CHECK(std::abs(gm0.mu_gauged[0] - s.mu1) < 1e-15);
    GaugedMultipliers gm = multipliers_with_gauge(s, 0.5, *g);
    CHECK(std::abs(gm.mu_gauged[0] - s.mu1 * std::exp(-kPi)) < 1e-15);
    CHECK(std::abs(gm.mu_gauged[1] - s.mu2 * std::exp(cplx(0.0, -kPi))) < 1e-14);
}

TEST_CASE("gauge action end to end: the gauged operator is singular at the gauged exponents") {
    auto g = square();
    PeriodicField U(g, 0.5);
    const cplx a = 0.5; // admissible: Im(a gamma_j) in pi Z
    // gauged potential u' = e^{a z - conj(a) zbar} u = u e^{i y} on this lattice
    PeriodicField Up(g);
    for (int j2 = 0; j2 < g->n2; ++j2)
        for (int j1 = 0; j1 < g->n1; ++j1) {
            cplx z = g->node(j1, j2);
            Up.at(j1, j2) = std::exp(a * z - std::conj(a) * std::conj(z)) * U.at(j1, j2);
        }
    Up = dealias(Up);

    std::array<double, 2> k{1.0 / kTwoPi, 0.0}; // on the circle of U
    auto [l, r] = bloch_exponents(k);
    BlochScanner sc(Up, 8);
    auto s_on = sc.sigmas(l - a, r);
    auto probe = sc.sigmas(l, r);
    CHECK(s_on.sigma_min < 1e-8 * s_on.sigma_max);
    CHECK(probe.sigma_min > 1e-4 * probe.sigma_max); // original exponents are off the curve
}

TEST_CASE("floquet nullspace: plane-wave kernel of the constant potential") {
    auto g = square();
    PeriodicField U(g, 0.5);
    // a generic point of the circle (the axis crossings are fold double
    // points where two plane waves coexist)
    const double t = 0.35;
    std::array<double, 2> k{std::cos(t) / kTwoPi, std::sin(t) / kTwoPi};
    NullspaceResult n = floquet_nullspace(U, k, 8);
    CHECK(n.sigma < 1e-10);
    CHECK_FALSE(n.near_degenerate);
    CHECK(dirac_residual(n.spinor, U) < 1e-9);
    // single plane wave: constant parts with ratio psi2/psi1 = -1/(i kx + ky)
    cplx expect = -1.0 / cplx(std::sin(t), std::cos(t));
    double err = 0.0;
    for (size_t i = 0; i < n.spinor.c1.part.v.size(); ++i) {
        err = std::max(err, std::abs(n.spinor.c1.part.v[i] - n.spinor.c1.part.v[0]));
        err = std::max(err, std::abs(n.spinor.c2.part.v[i] / n.spinor.c1.part.v[i] - expect));
    }
    CHECK(err < 1e-8);
    CHECK_THROWS_AS(floquet_nullspace(U, {0.03, 0.01}, 8), NotOnCurve);

    // at kappa = (1, 0) the kernel is two-dimensional; the fixture spinor
    // (1, i) e^{ix} is one member, and the flag reports the degeneracy
    NullspaceResult dbl = floquet_nullspace(U, {1.0 / kTwoPi, 0.0}, 8);
    CHECK(dbl.sigma < 1e-10);
    CHECK(dbl.near_degenerate);
    CHECK(dirac_residual(dbl.spinor, U) < 1e-8);
}

TEST_CASE("free operator nullspace: single-mode kernel at a free zero") {
    auto g = square();
    PeriodicField zero(g);
    NullspaceResult n = floquet_nullspace(zero, {0.0, 0.0}, 3);
    CHECK(n.sigma < 1e-12);
    CHECK(n.near_degenerate); // both rows of the zero-mode block vanish
    // each component is supported on the zero mode only
    for (const auto* comp : {&n.spinor.c1.part, &n.spinor.c2.part}) {
        auto modes = to_modes(*comp);
        for (size_t i = 1; i < modes.size(); ++i) CHECK(std::abs(modes[i]) < 1e-10);
    }
}

TEST_CASE("double point of the constant-potential curve is flagged") {
    auto g = square();
    PeriodicField U(g, 0.5);
    // circles centered at 0 and (1,0) meet at kappa = (1/2, sqrt(3)/2)
    std::array<double, 2> k{0.5 / kTwoPi, std::sqrt(3.0) / 2.0 / kTwoPi};
    NullspaceResult n = nullspace_at_exponents(U, bloch_exponents(k)[0], bloch_exponents(k)[1], 8);
    CHECK(n.near_degenerate);
    CHECK(n.gap_ratio < 10.0);
}

TEST_CASE("admissible family search recovers exact kernels for torus potentials") {
    auto g = square();
    // a genuine torus potential (deformed flat torus through the lift); only
    // such potentials carry exact torus-compatible kernels
    Immersion torus = curve_torus_immersion(g, 0.05, 0.0);
    GaussDecomposition dec = decompose_gauss_map(torus);
    LiftResult lift = lift_to_dirac(dec.g_psi, {1, 1}, g);
    WeierstrassData lifted = complete_weierstrass(dec, lift);

    AdmissibleSearchResult found =
        find_admissible_exponents(lifted.U, lifted.psi.lambda(), lifted.psi.rho(), 10, 1e-9);
    CHECK(found.converged);
    CHECK(found.sigma < 1e-9);
    CHECK(torus_compatible(*g, found.lambda, found.rho));

    WeierstrassData data =
        weierstrass_from_potential(lifted.U, lifted.psi.lambda(), lifted.psi.rho(), 10);
    CHECK(dirac_residual(data.psi, data.U) < 1e-9);
    CHECK(dirac_vee_residual(data.phi, data.U) < 1e-9);

    // for a generic (non-torus) perturbation of the constant potential the
    // compatible family has no kernel; sigma floors at the perturbation scale
    WeierstrassData ct = clifford_data(g);
    PeriodicField Ubad = ct.U + random_band_limited(g, 2, 0.01, 91);
    AdmissibleSearchResult miss = find_admissible_exponents(Ubad, ct.psi.lambda(), ct.psi.rho(), 6);
    CHECK_FALSE(miss.converged);
    CHECK(miss.sigma > 1e-8);
}
