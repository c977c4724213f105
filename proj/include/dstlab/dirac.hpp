#pragma once

// Dirac operators D and Dvee with complex potential U, spinor data for the
// Weierstrass representation, gauge transformations, and the Gauss-map
// decomposition / lift that produces Dirac spinors from an immersion.
//
// Conventions:
//   D   psi = (d psi2 + U psi1,      -dbar psi1 + conj(U) psi2)
//   Dvee phi = (d phi2 + conj(U) phi1, -dbar phi1 + U phi2)
// psi carries prefactor exponents (lambda, rho) on both components, phi
// carries (-lambda, -rho).

#include "dstlab/torus_field.hpp"

#include <array>
#include <optional>

namespace dst {

struct SpinorPair {
    QPF c1, c2; // components share (lambda, rho)

    SpinorPair() = default;
    SpinorPair(QPF a, QPF b);

    cplx lambda() const { return c1.lambda; }
    cplx rho() const { return c1.rho; }
    const GridPtr& grid() const { return c1.grid(); }
};

struct WeierstrassData {
    SpinorPair psi; // exponents (lambda, rho)
    SpinorPair phi; // exponents (-lambda, -rho)
    PeriodicField U;
    const GridPtr& grid() const { return U.grid; }
};

// Torus compatibility: Im((lambda - conj(rho)) gamma_j) in pi Z for both
// generators; makes all four Weierstrass integrands periodic.
bool torus_compatible(const TorusGrid& g, cplx lambda, cplx rho, double tol = 1e-9);
void require_weierstrass_consistent(const WeierstrassData& d, double tol = 1e-9);

// Residual spinor of the Dirac equation; zero iff D psi = 0.
SpinorPair apply_dirac(const SpinorPair& psi, const PeriodicField& U);
SpinorPair apply_dirac_vee(const SpinorPair& phi, const PeriodicField& U);
// max residual normalized by the infinity norms of the constituent terms
double dirac_residual(const SpinorPair& psi, const PeriodicField& U);
double dirac_vee_residual(const SpinorPair& phi, const PeriodicField& U);

// Gauge transform with h = a + b z; requires Im(b gamma_j) in pi Z.
// psi -> (e^h psi1, e^{conj h} psi2), phi -> (e^{-h} phi1, e^{-conj h} phi2),
// U -> e^{conj h - h} U.
WeierstrassData gauge_transform(const WeierstrassData& data, cplx a, cplx b,
                                double tol = 1e-9);
bool gauge_admissible(const TorusGrid& g, cplx b, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Gauss map data
// ---------------------------------------------------------------------------

// One CP^1 component of the Gauss map, stored as the lift
// (e^{i theta} cos eta : sin eta) with integer winding of theta split off:
// theta(z) = 2 pi (w1 u1 + w2 u2) + theta_p(z) in lattice coordinates.
struct GaussMapComponent {
    PeriodicField theta_p; // periodic remainder (real-valued)
    int w1 = 0, w2 = 0;    // winding numbers of e^{i theta} over gamma_1, gamma_2
    PeriodicField eta;     // real-valued
};

struct Immersion; // defined in weierstrass.hpp

struct GaussDecomposition {
    GaussMapComponent g_psi, g_phi;
    double conformal_defect = 0.0;
    // the four spinor products recovered from x_z (inverse Segre relations)
    PeriodicField p11;  // phi1 psi1        = -i f1 - f2
    PeriodicField p22;  // conj(phi2 psi2)  = -i f1 + f2
    PeriodicField p21;  // conj(phi2) psi1  =  f3 - i f4
    PeriodicField p12;  // phi1 conj(psi2)  =  f3 + i f4
};

GaussDecomposition decompose_gauss_map(const Immersion& x, double conformal_tol = 1e-8);

struct LiftResult {
    SpinorPair psi;
    PeriodicField U;
    cplx b, c; // linear exponents of the dbar-problem solution g = b z + c zbar + g_p
};

// Solves g_zbar = -i theta_zbar cos^2(eta) with zero-mean periodic part,
// c = mean of the right-hand side, and b = b0 + n1 beta1 + n2 beta2 where b0
// matches the coset condition Im(b gamma_j + c conj(gamma_j)) in pi Z and
// beta_j span the admissible lattice {Im(b gamma_j) in pi Z}.
LiftResult lift_to_dirac(const GaussMapComponent& g, std::array<int, 2> b_choice,
                         const GridPtr& grid);

// Basis of the admissible gauge lattice: Im(beta_k gamma_j) = pi delta_kj.
std::array<cplx, 2> gauge_lattice_basis(const TorusGrid& g);

// Completes (psi, U) from a lift to full Weierstrass data using the product
// fields of the decomposition; phi then satisfies Dvee phi = 0.
WeierstrassData complete_weierstrass(const GaussDecomposition& dec, const LiftResult& lift);

// ---------------------------------------------------------------------------
// Canonical fixtures on the square lattice (gamma1, gamma2) = (2pi, 2pi i)
// ---------------------------------------------------------------------------

// Product torus r(cos u, sin u, cos v, sin v) spinor data:
// psi1 = psi2 = i sqrt(r/2) e^{-i(u+v)/2}, phi1 = -phi2 = i sqrt(r/2) e^{i(v-u)/2},
// U = (1+i)/4.
WeierstrassData clifford_data(const GridPtr& grid, double r = 1.0);

// Plane-wave data for constant real U = s: psi = phi = (1, i) e^{i 2 s x};
// closes only in one direction (a cylinder).
WeierstrassData plane_wave_data(const GridPtr& grid, double s = 0.5);

} // namespace dst
