#include "dstlab/dirac.hpp"
#include "dstlab/weierstrass.hpp"

#include <cmath>
#include <functional>

namespace dst {

namespace {

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

// Phase unwrapping of a nonvanishing complex field on the torus. Returns the
// unwrapped angle, winding numbers, and throws on phase vortices.
struct UnwrappedPhase {
    std::vector<double> theta;
    int w1 = 0, w2 = 0;
};

UnwrappedPhase unwrap_phase(const TorusGrid& g, const std::vector<cplx>& r) {
    const int n1 = g.n1, n2 = g.n2;
    auto idx = [&](int j1, int j2) {
        return static_cast<size_t>(((j1 % n1 + n1) % n1) + n1 * ((j2 % n2 + n2) % n2));
    };
    std::vector<double> ph(r.size());
    for (size_t i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) < 1e-14)
            throw GaussMapSingular("Gauss-map ratio vanishes at a node");
        ph[i] = std::arg(r[i]);
    }
    auto diff = [&](size_t a, size_t b) { return wrap_pi(ph[b] - ph[a]); };

    // winding along direction 1, checked on every row
    double acc = 0.0;
    for (int j1 = 0; j1 < n1; ++j1) acc += diff(idx(j1, 0), idx(j1 + 1, 0));
    int w1 = static_cast<int>(std::lround(acc / kTwoPi));
    if (std::abs(acc - kTwoPi * w1) > 1e-6)
        throw WindingObstruction("non-integer winding along gamma1");
    for (int j2 = 1; j2 < n2; ++j2) {
        double a = 0.0;
        for (int j1 = 0; j1 < n1; ++j1) a += diff(idx(j1, j2), idx(j1 + 1, j2));
        if (std::lround(a / kTwoPi) != w1)
            throw WindingObstruction("winding along gamma1 differs between rows");
    }
    acc = 0.0;
    for (int j2 = 0; j2 < n2; ++j2) acc += diff(idx(0, j2), idx(0, j2 + 1));
    int w2 = static_cast<int>(std::lround(acc / kTwoPi));
    if (std::abs(acc - kTwoPi * w2) > 1e-6)
        throw WindingObstruction("non-integer winding along gamma2");
    for (int j1 = 1; j1 < n1; ++j1) {
        double a = 0.0;
        for (int j2 = 0; j2 < n2; ++j2) a += diff(idx(j1, j2), idx(j1, j2 + 1));
        if (std::lround(a / kTwoPi) != w2)
            throw WindingObstruction("winding along gamma2 differs between columns");
    }

    UnwrappedPhase out;
    out.w1 = w1;
    out.w2 = w2;
    out.theta.resize(r.size());
    out.theta[0] = ph[0];
    for (int j1 = 1; j1 < n1; ++j1)
        out.theta[idx(j1, 0)] = out.theta[idx(j1 - 1, 0)] + diff(idx(j1 - 1, 0), idx(j1, 0));
    for (int j2 = 1; j2 < n2; ++j2)
        for (int j1 = 0; j1 < n1; ++j1)
            out.theta[idx(j1, j2)] =
                out.theta[idx(j1, j2 - 1)] + diff(idx(j1, j2 - 1), idx(j1, j2));
    // curl check: horizontal steps must be consistent after column unwrapping
    for (int j2 = 0; j2 < n2; ++j2)
        for (int j1 = 0; j1 + 1 < n1; ++j1) {
            double step = out.theta[idx(j1 + 1, j2)] - out.theta[idx(j1, j2)];
            if (std::abs(step - diff(idx(j1, j2), idx(j1 + 1, j2))) > 1e-6)
                throw GaussMapSingular("phase vortex inside the fundamental domain");
        }
    return out;
}

GaussMapComponent component_from_ratio(const GridPtr& grid, const std::vector<cplx>& ratio) {
    const auto& g = *grid;
    auto uw = unwrap_phase(g, ratio);
    GaussMapComponent comp;
    comp.w1 = uw.w1;
    comp.w2 = uw.w2;
    comp.theta_p = PeriodicField(grid);
    comp.eta = PeriodicField(grid);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            size_t i = static_cast<size_t>(j1 + g.n1 * j2);
            double lin = kTwoPi * (double(uw.w1) * j1 / g.n1 + double(uw.w2) * j2 / g.n2);
            comp.theta_p.v[i] = uw.theta[i] - lin;
            comp.eta.v[i] = std::atan2(1.0, std::abs(ratio[i])); // cot(eta) = |ratio|
        }
    return comp;
}

PeriodicField pointwise(const GridPtr& grid, const std::function<cplx(int, int)>& f) {
    PeriodicField out(grid);
    for (int j2 = 0; j2 < grid->n2; ++j2)
        for (int j1 = 0; j1 < grid->n1; ++j1) out.at(j1, j2) = f(j1, j2);
    return out;
}

} // namespace

GaussDecomposition decompose_gauss_map(const Immersion& x, double conformal_tol) {
    const GridPtr& grid = x.grid;
    std::array<PeriodicField, 4> f;
    for (int k = 0; k < 4; ++k) {
        f[static_cast<size_t>(k)] = derivative(x.periodic[static_cast<size_t>(k)], Der::d);
        for (auto& v : f[static_cast<size_t>(k)].v) v += x.linear[static_cast<size_t>(k)];
    }
    // pointwise diagnostic; dealiasing would smear the node values
    double defect = 0.0;
    for (size_t i = 0; i < f[0].v.size(); ++i) {
        cplx s = 0.0;
        for (int k = 0; k < 4; ++k) s += f[static_cast<size_t>(k)].v[i] * f[static_cast<size_t>(k)].v[i];
        defect = std::max(defect, std::abs(s));
    }
    if (defect > conformal_tol)
        throw NotConformal("sum of squares of x_z is " + std::to_string(defect));

    GaussDecomposition dec;
    dec.conformal_defect = defect;
    const cplx mi(0.0, -1.0), pi_(0.0, 1.0);
    dec.p11 = PeriodicField(grid); // -i f1 - f2
    dec.p22 = PeriodicField(grid); // -i f1 + f2
    dec.p21 = PeriodicField(grid); //  f3 - i f4
    dec.p12 = PeriodicField(grid); //  f3 + i f4
    for (size_t i = 0; i < dec.p11.v.size(); ++i) {
        dec.p11.v[i] = mi * f[0].v[i] - f[1].v[i];
        dec.p22.v[i] = mi * f[0].v[i] + f[1].v[i];
        dec.p21.v[i] = f[2].v[i] + mi * f[3].v[i];
        dec.p12.v[i] = f[2].v[i] + pi_ * f[3].v[i];
    }

    // projective ratios: psi1 / conj(psi2) = p21/p22 = p11/p12,
    //                    phi1 / conj(phi2) = p11/p21 = p12/p22
    const size_t n = dec.p11.v.size();
    std::vector<cplx> r_psi(n), r_phi(n);
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i)
        scale = std::max({scale, std::abs(dec.p11.v[i]), std::abs(dec.p22.v[i]),
                          std::abs(dec.p21.v[i]), std::abs(dec.p12.v[i])});
    for (size_t i = 0; i < n; ++i) {
        cplx a = dec.p11.v[i], b = dec.p22.v[i], c = dec.p21.v[i], d = dec.p12.v[i];
        if (std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}) <
            1e-12 * scale + 1e-300)
            throw GaussMapSingular("all four spinor products vanish at a node");
        r_psi[i] = std::abs(b) >= std::abs(d) ? c / b : a / d;
        r_phi[i] = std::abs(c) >= std::abs(b) ? a / c : d / b;
    }
    dec.g_psi = component_from_ratio(grid, r_psi);
    dec.g_phi = component_from_ratio(grid, r_phi);
    return dec;
}

LiftResult lift_to_dirac(const GaussMapComponent& gm, std::array<int, 2> b_choice,
                         const GridPtr& grid) {
    const auto& g = *grid;
    // winding part of theta in Cartesian coordinates: theta_lin = p x + q y
    double p = kTwoPi * (gm.w1 * g.dual1[0] + gm.w2 * g.dual2[0]);
    double q = kTwoPi * (gm.w1 * g.dual1[1] + gm.w2 * g.dual2[1]);
    cplx t = 0.5 * cplx(p, -q);

    PeriodicField cos2(grid), sincos(grid), sin_eta(grid), cos_eta(grid);
    for (size_t i = 0; i < cos2.v.size(); ++i) {
        double e = gm.eta.v[i].real();
        cos2.v[i] = std::cos(e) * std::cos(e);
        sincos.v[i] = std::sin(e) * std::cos(e);
        sin_eta.v[i] = std::sin(e);
        cos_eta.v[i] = std::cos(e);
    }

    // g_zbar = -i theta_zbar cos^2 eta
    PeriodicField theta_zbar = derivative(gm.theta_p, Der::dbar);
    for (auto& v : theta_zbar.v) v += std::conj(t);
    PeriodicField rhs = cplx(0.0, -1.0) * product(theta_zbar, cos2);
    cplx c = moments(rhs).mean;
    PeriodicField g_p = inverse_derivative_zero_mean(rhs, Der::dbar);

    // b0 solves Im(b0 gamma_j) = -Im(c conj(gamma_j)); b_choice offsets by the
    // admissible lattice
    auto solve_b = [&](double r1, double r2) {
        double a11 = g.gamma1.imag(), a12 = g.gamma1.real();
        double a21 = g.gamma2.imag(), a22 = g.gamma2.real();
        double det = a11 * a22 - a12 * a21;
        return cplx((r1 * a22 - r2 * a12) / det, (a11 * r2 - a21 * r1) / det);
    };
    cplx b0 = solve_b(-(c * std::conj(g.gamma1)).imag(), -(c * std::conj(g.gamma2)).imag());
    auto beta = gauge_lattice_basis(g);
    cplx b = b0 + double(b_choice[0]) * beta[0] + double(b_choice[1]) * beta[1];

    // U = -e^{conj g - g - i theta} (i theta_z sin eta cos eta + eta_z)
    PeriodicField theta_z = derivative(gm.theta_p, Der::d);
    for (auto& v : theta_z.v) v += t;
    PeriodicField u0 = cplx(0.0, 1.0) * product(theta_z, sincos) + derivative(gm.eta, Der::d);

    const cplx el = std::conj(c) - b - cplx(0.0, 1.0) * t;
    const cplx er = std::conj(b) - c - cplx(0.0, 1.0) * std::conj(t);
    if (!exponent_is_periodic(g, el, er, 1e-8))
        throw WindingObstruction("potential prefactor is not periodic");

    auto E = [&](int j1, int j2) {
        cplx z = g.node(j1, j2);
        return std::exp(el * z + er * std::conj(z));
    };
    PeriodicField U = pointwise(grid, [&](int j1, int j2) {
        size_t i = static_cast<size_t>(j1 + g.n1 * j2);
        cplx gp = g_p.v[i];
        cplx ex = std::exp(std::conj(gp) - gp - cplx(0.0, 1.0) * gm.theta_p.v[i]);
        return -E(j1, j2) * ex * u0.v[i];
    });
    U = dealias(U);

    const cplx lambda = b + cplx(0.0, 1.0) * t;
    const cplx rho = c + cplx(0.0, 1.0) * std::conj(t);
    PeriodicField psi1 = pointwise(grid, [&](int j1, int j2) {
        size_t i = static_cast<size_t>(j1 + g.n1 * j2);
        return std::exp(g_p.v[i] + cplx(0.0, 1.0) * gm.theta_p.v[i]) * cos_eta.v[i];
    });
    PeriodicField psi2 = pointwise(grid, [&](int j1, int j2) {
        size_t i = static_cast<size_t>(j1 + g.n1 * j2);
        return E(j1, j2) * std::exp(std::conj(g_p.v[i])) * sin_eta.v[i];
    });
    LiftResult out;
    out.psi = SpinorPair(QPF(lambda, rho, dealias(psi1)), QPF(lambda, rho, dealias(psi2)));
    out.U = std::move(U);
    out.b = b;
    out.c = c;
    return out;
}

WeierstrassData complete_weierstrass(const GaussDecomposition& dec, const LiftResult& lift) {
    const GridPtr& grid = lift.U.grid;
    const auto& g = *grid;
    const cplx lambda = lift.psi.lambda(), rho = lift.psi.rho();
    // fold factor for routes passing through conj(psi): e^{(l - conj(r)) z + (r - conj(l)) zbar}
    const cplx fl = lambda - std::conj(rho), fr = rho - std::conj(lambda);
    if (!exponent_is_periodic(g, fl, fr, 1e-8))
        throw NonPeriodicProduct("lifted exponents are not torus-compatible");

    PeriodicField phi1(grid), phi2(grid);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            size_t i = static_cast<size_t>(j1 + g.n1 * j2);
            cplx p1 = lift.psi.c1.part.v[i], p2 = lift.psi.c2.part.v[i];
            cplx z = g.node(j1, j2);
            cplx F = std::exp(fl * z + fr * std::conj(z));
            if (std::abs(p1) >= std::abs(p2)) {
                phi1.v[i] = dec.p11.v[i] / p1;                 // phi1 = (phi1 psi1)/psi1
                phi2.v[i] = F * std::conj(dec.p21.v[i] / p1);  // from conj(phi2) psi1
            } else {
                phi1.v[i] = F * dec.p12.v[i] / std::conj(p2);  // from phi1 conj(psi2)
                phi2.v[i] = std::conj(dec.p22.v[i]) / p2;      // from conj(phi2 psi2)
            }
        }
    SpinorPair phi(QPF(-lambda, -rho, dealias(phi1)), QPF(-lambda, -rho, dealias(phi2)));
    WeierstrassData data{lift.psi, std::move(phi), lift.U};
    require_weierstrass_consistent(data);
    return data;
}

} // namespace dst
