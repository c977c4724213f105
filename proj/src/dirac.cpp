#include "dstlab/dirac.hpp"

#include <cmath>

namespace dst {

SpinorPair::SpinorPair(QPF a, QPF b) : c1(std::move(a)), c2(std::move(b)) {
    if (c1.lambda != c2.lambda || c1.rho != c2.rho)
        throw DomainError("spinor components must share prefactor exponents");
    require_same_grid(c1.grid(), c2.grid());
}

bool torus_compatible(const TorusGrid& g, cplx lambda, cplx rho, double tol) {
    cplx s = lambda - std::conj(rho);
    for (cplx gamma : {g.gamma1, g.gamma2}) {
        double r = (s * gamma).imag() / kPi;
        if (std::abs(r - std::round(r)) > tol) return false;
    }
    return true;
}

void require_weierstrass_consistent(const WeierstrassData& d, double tol) {
    require_same_grid(d.psi.grid(), d.U.grid);
    require_same_grid(d.phi.grid(), d.U.grid);
    if (d.phi.lambda() != -d.psi.lambda() || d.phi.rho() != -d.psi.rho())
        throw DomainError("phi exponents must be opposite to psi exponents");
    if (!torus_compatible(*d.U.grid, d.psi.lambda(), d.psi.rho(), tol))
        throw NonPeriodicProduct("spinor exponents are not torus-compatible");
}

SpinorPair apply_dirac(const SpinorPair& psi, const PeriodicField& U) {
    require_same_grid(psi.grid(), U.grid);
    QPF r1 = derivative(psi.c2, Der::d) + product(psi.c1, U);
    QPF r2 = cplx(-1.0) * derivative(psi.c1, Der::dbar) + product(psi.c2, conj_field(U));
    return SpinorPair(std::move(r1), std::move(r2));
}

SpinorPair apply_dirac_vee(const SpinorPair& phi, const PeriodicField& U) {
    require_same_grid(phi.grid(), U.grid);
    QPF r1 = derivative(phi.c2, Der::d) + product(phi.c1, conj_field(U));
    QPF r2 = cplx(-1.0) * derivative(phi.c1, Der::dbar) + product(phi.c2, U);
    return SpinorPair(std::move(r1), std::move(r2));
}

namespace {
double residual_scale(const SpinorPair& s, const PeriodicField& U) {
    double scale = max_abs(derivative(s.c2, Der::d).part) +
                   max_abs(derivative(s.c1, Der::dbar).part) +
                   max_abs(U) * (max_abs(s.c1.part) + max_abs(s.c2.part));
    return scale + 1e-300;
}
} // namespace

double dirac_residual(const SpinorPair& psi, const PeriodicField& U) {
    SpinorPair r = apply_dirac(psi, U);
    return std::max(max_abs(r.c1.part), max_abs(r.c2.part)) / residual_scale(psi, U);
}

double dirac_vee_residual(const SpinorPair& phi, const PeriodicField& U) {
    SpinorPair r = apply_dirac_vee(phi, U);
    return std::max(max_abs(r.c1.part), max_abs(r.c2.part)) / residual_scale(phi, U);
}

bool gauge_admissible(const TorusGrid& g, cplx b, double tol) {
    for (cplx gamma : {g.gamma1, g.gamma2}) {
        double r = (b * gamma).imag() / kPi;
        if (std::abs(r - std::round(r)) > tol) return false;
    }
    return true;
}

WeierstrassData gauge_transform(const WeierstrassData& data, cplx a, cplx b, double tol) {
    const auto& g = *data.grid();
    if (!gauge_admissible(g, b, tol))
        throw InadmissibleGauge("Im(b gamma_j) is not an integer multiple of pi");

    // h = a + b z. e^h psi1 shifts lambda by b; e^{conj h} psi2 shifts rho by
    // conj(b), which re-expresses as the shared shift (b, 0) times the
    // periodic factor e^{conj(b) zbar - b z} (unit multipliers for admissible b).
    auto scale_part = [&](const PeriodicField& p, cplx s, cplx el, cplx er) {
        PeriodicField out(p.grid);
        for (int j2 = 0; j2 < g.n2; ++j2)
            for (int j1 = 0; j1 < g.n1; ++j1) {
                cplx z = g.node(j1, j2);
                out.at(j1, j2) = s * std::exp(el * z + er * std::conj(z)) * p.at(j1, j2);
            }
        return dealias(out);
    };

    cplx ea = std::exp(a), eab = std::exp(std::conj(a));
    WeierstrassData out;
    out.psi = SpinorPair(
        QPF(data.psi.lambda() + b, data.psi.rho(), ea * data.psi.c1.part),
        QPF(data.psi.lambda() + b, data.psi.rho(),
            scale_part(data.psi.c2.part, eab, -b, std::conj(b))));
    out.phi = SpinorPair(
        QPF(-data.psi.lambda() - b, -data.psi.rho(), (1.0 / ea) * data.phi.c1.part),
        QPF(-data.psi.lambda() - b, -data.psi.rho(),
            scale_part(data.phi.c2.part, 1.0 / eab, b, -std::conj(b))));
    // U -> e^{conj h - h} U
    out.U = scale_part(data.U, eab / ea, -b, std::conj(b));
    return out;
}

std::array<cplx, 2> gauge_lattice_basis(const TorusGrid& g) {
    // solve Im(beta gamma_j) = pi delta_kj; Im(beta gamma) =
    // Re(beta) Im(gamma) + Im(beta) Re(gamma)
    auto solve = [&](double r1, double r2) {
        double a11 = g.gamma1.imag(), a12 = g.gamma1.real();
        double a21 = g.gamma2.imag(), a22 = g.gamma2.real();
        double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-300) throw DegenerateLattice("gauge lattice solve failed");
        double re = (r1 * a22 - r2 * a12) / det;
        double im = (a11 * r2 - a21 * r1) / det;
        return cplx(re, im);
    };
    return {solve(kPi, 0.0), solve(0.0, kPi)};
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

WeierstrassData clifford_data(const GridPtr& grid, double r) {
    const double amp = std::sqrt(r / 2.0);
    const cplx lambda(-0.25, -0.25), rho(0.25, -0.25);
    const cplx i1(0.0, 1.0);

    PeriodicField cpsi(grid, i1 * amp); // e^{-i(u+v)/2} is the prefactor itself
    SpinorPair psi(QPF(lambda, rho, cpsi), QPF(lambda, rho, cpsi));

    // true phi exponents are (-lambda - i/2, -rho - i/2); the absorbed factor
    // e^{-i(z+zbar)/2} = e^{-iu} becomes part of the periodic parts
    PeriodicField pphi(grid);
    const auto& g = *grid;
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            double u = kTwoPi * j1 / g.n1;
            pphi.at(j1, j2) = i1 * amp * std::exp(cplx(0.0, -u));
        }
    SpinorPair phi(QPF(-lambda, -rho, pphi), QPF(-lambda, -rho, cplx(-1.0) * pphi));

    WeierstrassData d{std::move(psi), std::move(phi), PeriodicField(grid, cplx(0.25, 0.25))};
    require_weierstrass_consistent(d);
    return d;
}

WeierstrassData plane_wave_data(const GridPtr& grid, double s) {
    // psi = phi = (1, i) e^{i 2 s x}; for s = 1/2 on the square lattice the
    // phase is the single mode (1, 0).
    const auto& g = *grid;
    PeriodicField wave(grid);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            cplx z = g.node(j1, j2);
            wave.at(j1, j2) = std::exp(cplx(0.0, 2.0 * s * z.real()));
        }
    wave = dealias(wave);
    SpinorPair psi(QPF(0.0, 0.0, wave), QPF(0.0, 0.0, cplx(0.0, 1.0) * wave));
    SpinorPair phi = psi;
    WeierstrassData d{std::move(psi), std::move(phi), PeriodicField(grid, s)};
    require_weierstrass_consistent(d);
    return d;
}

} // namespace dst
