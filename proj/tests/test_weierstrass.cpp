#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dstlab/weierstrass.hpp"
#include "reference.hpp"

#include <cmath>
#include <random>

using namespace dst;

namespace {

GridPtr square(int n = 32) { return make_lattice(kTwoPi, cplx(0.0, kTwoPi), n, n); }

double ang_u(const GridPtr& g, int j1) { return kTwoPi * j1 / g->n1; }
double ang_v(const GridPtr& g, int j2) { return kTwoPi * j2 / g->n2; }

} // namespace

TEST_CASE("forms of the product torus are the four trigonometric fields") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(clifford_data(g));
    double err = 0.0;
    for (int j2 = 0; j2 < g->n2; ++j2)
        for (int j1 = 0; j1 < g->n1; ++j1) {
            double u = ang_u(g, j1), v = ang_v(g, j2);
            err = std::max(err, std::abs(f.f[0].at(j1, j2) + 0.5 * std::sin(u)));
            err = std::max(err, std::abs(f.f[1].at(j1, j2) - 0.5 * std::cos(u)));
            err = std::max(err, std::abs(f.f[2].at(j1, j2) - cplx(0.0, 0.5) * std::sin(v)));
            err = std::max(err, std::abs(f.f[3].at(j1, j2) + cplx(0.0, 0.5) * std::cos(v)));
        }
    CHECK(err < 1e-13);
}

TEST_CASE("forms of the plane-wave pair: f3 = -i, f1 = -sin 2x") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(plane_wave_data(g, 0.5));
    double err = 0.0;
    for (int j2 = 0; j2 < g->n2; ++j2)
        for (int j1 = 0; j1 < g->n1; ++j1) {
            double x = ang_u(g, j1);
            err = std::max(err, std::abs(f.f[2].at(j1, j2) - cplx(0.0, -1.0)));
            err = std::max(err, std::abs(f.f[0].at(j1, j2) + std::sin(2.0 * x)));
            err = std::max(err, std::abs(f.f[3].at(j1, j2)));
        }
    CHECK(err < 1e-13);
}

TEST_CASE("zero spinors give zero forms") {
    auto g = square();
    WeierstrassData d = clifford_data(g);
    d.psi = SpinorPair(QPF(d.psi.lambda(), d.psi.rho(), PeriodicField(g)),
                       QPF(d.psi.lambda(), d.psi.rho(), PeriodicField(g)));
    WeierstrassForms f = forms_from_spinors(d);
    for (const auto& fk : f.f) CHECK(max_abs(fk) < 1e-15);
}

TEST_CASE("closedness residual: exact data, single wave, constants") {
    auto g = square();
    WeierstrassForms ct = forms_from_spinors(clifford_data(g));
    CHECK(closedness_residual(ct) < 1e-12);

    WeierstrassForms w;
    std::pair<std::array<int, 2>, cplx> entry{{1, 0}, 1.0};
    w.f[0] = field_from_mode_list(g, std::span(&entry, 1));
    for (int k = 1; k < 4; ++k) w.f[static_cast<size_t>(k)] = PeriodicField(g);
    CHECK(closedness_max_imag(w) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(closedness_residual(w) == doctest::Approx(1.0).epsilon(1e-9));

    WeierstrassForms c;
    for (int k = 0; k < 4; ++k) c.f[static_cast<size_t>(k)] = PeriodicField(g, cplx(0.3, 0.1));
    CHECK(closedness_residual(c) < 1e-15);
}

TEST_CASE("closure report: torus closes, plane wave is a cylinder, zero data") {
    auto g = square();
    ClosureReport ct = closure_report(clifford_data(g));
    CHECK(ct.max_period() < 1e-12);
    CHECK(ct.max_closure_integral() < 1e-12);
    CHECK(ct.closedness < 1e-12);

    ClosureReport pw = closure_report(plane_wave_data(g, 0.5));
    // mean f3 = -i gives V^3(gamma2) = 2 Re(-i 2pi i) = 4pi
    CHECK(pw.period_vectors[2][1] == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(std::abs(pw.period_vectors[2][0]) < 1e-12);

    WeierstrassData zero = clifford_data(g);
    zero.phi = SpinorPair(QPF(zero.phi.lambda(), zero.phi.rho(), PeriodicField(g)),
                          QPF(zero.phi.lambda(), zero.phi.rho(), PeriodicField(g)));
    ClosureReport zr = closure_report(zero);
    CHECK(zr.max_period() < 1e-15);
    CHECK(zr.max_closure_integral() < 1e-15);
}

TEST_CASE("integrate_surface reproduces the anchored product torus") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(clifford_data(g));
    Immersion x = integrate_surface(f, {0.0, 0.0, 0.0, 0.0});
    double err = 0.0;
    for (int j2 = 0; j2 < g->n2; ++j2)
        for (int j1 = 0; j1 < g->n1; ++j1) {
            auto p = x.value(j1, j2);
            double u = ang_u(g, j1), v = ang_v(g, j2);
            err = std::max({err, std::abs(p[0] - (std::cos(u) - 1.0)),
                            std::abs(p[1] - std::sin(u)),
                            std::abs(p[2] - (std::cos(v) - 1.0)),
                            std::abs(p[3] - std::sin(v))});
        }
    CHECK(err < 1e-12);
    // derivative round trip d x^k = f_k
    for (int k = 0; k < 4; ++k) {
        PeriodicField dx = derivative(x.periodic[static_cast<size_t>(k)], Der::d);
        for (auto& vv : dx.v) vv += x.linear[static_cast<size_t>(k)];
        CHECK(max_abs(dx - f.f[static_cast<size_t>(k)]) < 1e-10);
    }
}

TEST_CASE("integrate_surface: zero forms give the constant basepoint") {
    auto g = square();
    WeierstrassForms f;
    for (int k = 0; k < 4; ++k) f.f[static_cast<size_t>(k)] = PeriodicField(g);
    Immersion x = integrate_surface(f, {1.0, -2.0, 0.5, 3.0});
    auto p = x.value(7, 13);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(-2.0));
    CHECK(p[2] == doctest::Approx(0.5));
    CHECK(p[3] == doctest::Approx(3.0));
}

TEST_CASE("integrate_surface: plane-wave forms produce the cylinder drift") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(plane_wave_data(g, 0.5));
    Immersion x = integrate_surface(f, {0.0, 0.0, 0.0, 0.0});
    // dx^3 = 2 dy: period over gamma2 is 4pi, none over gamma1
    auto per1 = x.period(g->gamma1);
    auto per2 = x.period(g->gamma2);
    CHECK(std::abs(per1[2]) < 1e-12);
    CHECK(per2[2] == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    // one-form integration oracle along gamma2: x^3(0, j2) - x^3(0, 0) ~ 2 y
    double err = 0.0;
    for (int j2 = 0; j2 < g->n2; ++j2) {
        double y = kTwoPi * j2 / g->n2;
        err = std::max(err, std::abs(x.value(0, j2)[2] - x.value(0, 0)[2] - 2.0 * y));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("integrate_surface rejects non-closed forms") {
    auto g = square();
    WeierstrassForms f;
    std::pair<std::array<int, 2>, cplx> entry{{1, 0}, 1.0};
    f.f[0] = field_from_mode_list(g, std::span(&entry, 1));
    for (int k = 1; k < 4; ++k) f.f[static_cast<size_t>(k)] = PeriodicField(g);
    CHECK_THROWS_AS(integrate_surface(f, {0, 0, 0, 0}), NotClosed);
}

TEST_CASE("metric and curvature on scaled product tori") {
    auto g = square();
    for (double r : {1.0, 2.0}) {
        WeierstrassData d = clifford_data(g, r);
        Immersion x = integrate_surface(forms_from_spinors(d), {0, 0, 0, 0});
        MetricCurvature mc = metric_and_curvature(d, x);
        double e2a_expect = r * r;
        double h_expect = std::sqrt(2.0) / (2.0 * r);
        double e_err = 0.0, h_err = 0.0;
        for (size_t i = 0; i < mc.e2alpha.v.size(); ++i) {
            e_err = std::max(e_err, std::abs(mc.e2alpha.v[i].real() - e2a_expect));
            h_err = std::max(h_err, std::abs(mc.h_norm.v[i].real() - h_expect));
        }
        CHECK(e_err < 1e-12);
        CHECK(h_err < 1e-10);
        CHECK(mc.potential_defect < 1e-8);
    }
}

TEST_CASE("minimal surface: zero potential gives zero mean curvature") {
    auto g = square();
    // holomorphic psi, antiholomorphic-free phi with U = 0 and compatible exponents
    cplx b(0.0, 0.5);
    SpinorPair psi(QPF(b, 0.0, PeriodicField(g, 1.0)), QPF(b, 0.0, PeriodicField(g)));
    SpinorPair phi(QPF(-b, 0.0, PeriodicField(g, 1.0)), QPF(-b, 0.0, PeriodicField(g)));
    WeierstrassData d{psi, phi, PeriodicField(g)};
    CHECK(dirac_residual(d.psi, d.U) < 1e-14);
    Immersion x = integrate_surface(forms_from_spinors(d), {0, 0, 0, 0});
    MetricCurvature mc = metric_and_curvature(d, x);
    CHECK(max_abs(mc.h_norm) < 1e-10);
    CHECK(mc.potential_defect < 1e-8);
}

TEST_CASE("willmore functional values") {
    auto g = square();
    CHECK(willmore(PeriodicField(g)) == doctest::Approx(0.0));
    WeierstrassData ct = clifford_data(g);
    CHECK(willmore(ct.U) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));

    std::pair<std::array<int, 2>, cplx> entry{{1, 0}, 0.5};
    PeriodicField u = field_from_mode_list(g, std::span(&entry, 1));
    CHECK(willmore(u) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-12));

    // independent route through the immersion
    Immersion x = integrate_surface(forms_from_spinors(ct), {0, 0, 0, 0});
    MetricCurvature mc = metric_and_curvature(ct, x);
    CHECK(std::abs(willmore_from_immersion(mc, g->area) - 2.0 * kPi * kPi) < 1e-5);
}

TEST_CASE("small Dirac residual bounds the closedness residual") {
    auto g = square();
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    for (double eps : {1e-6, 1e-4}) {
        WeierstrassData d = clifford_data(g);
        PeriodicField n1 = random_band_limited(g, 3, eps, rng());
        PeriodicField n2 = random_band_limited(g, 3, eps, rng());
        d.psi = SpinorPair(QPF(d.psi.lambda(), d.psi.rho(), d.psi.c1.part + n1),
                           QPF(d.psi.lambda(), d.psi.rho(), d.psi.c2.part + n2));
        double tau = std::max(dirac_residual(d.psi, d.U), dirac_vee_residual(d.phi, d.U));
        double res = closedness_residual(forms_from_spinors(d));
        CHECK(res < 10.0 * tau);
    }
}

TEST_CASE("metric rejects degenerate spinor data") {
    auto g = square();
    WeierstrassData d = clifford_data(g);
    Immersion x = integrate_surface(forms_from_spinors(d), {0, 0, 0, 0});
    d.psi = SpinorPair(QPF(d.psi.lambda(), d.psi.rho(), PeriodicField(g)),
                       QPF(d.psi.lambda(), d.psi.rho(), PeriodicField(g)));
    CHECK_THROWS_AS(metric_and_curvature(d, x), DegenerateMetric);
}

TEST_CASE("deformed torus: lifted potential matches curvature, both Willmore routes") {
    auto g = square();
    Immersion torus = curve_torus_immersion(g, 0.05, 0.0);
    GaussDecomposition dec = decompose_gauss_map(torus);
    LiftResult lift = lift_to_dirac(dec.g_psi, {1, 1}, g);
    WeierstrassData data = complete_weierstrass(dec, lift);
    Immersion x = integrate_surface(forms_from_spinors(data), {0, 0, 0, 0});
    MetricCurvature mc = metric_and_curvature(data, x);
    // |U| equals |H| e^alpha / 2 from the immersion; here e^{2 alpha} = 1 and
    // |H| = sqrt(1 + curvature(u)^2)/2 varies along the curve
    CHECK(mc.potential_defect < 1e-6);
    double w_spinor = willmore(data.U);
    double w_surface = willmore_from_immersion(mc, g->area);
    CHECK(std::abs(w_spinor - w_surface) < 1e-5);
    CHECK(w_spinor > 2.0 * kPi * kPi); // the round torus minimizes in this family
}
