#pragma once

// Weierstrass representation on a torus: the four closed 1-forms
// eta_k = f_k dz + conj(f_k) dzbar built from a spinor pair, closure and
// period data, integration to an immersion in R^4, induced metric, mean
// curvature, and the Willmore functional.
//
// Sign conventions fixed globally: dz ^ dzbar = -2i dx ^ dy, so
// W = 4 * integral |U|^2 dA.

#include "dstlab/dirac.hpp"
#include "dstlab/torus_field.hpp"

#include <array>

namespace dst {

struct Immersion {
    GridPtr grid;
    std::array<PeriodicField, 4> periodic; // real-valued, zero mean
    std::array<cplx, 4> linear{};          // x^k = 2 Re(c_k z) + periodic + anchor
    std::array<double, 4> basepoint{};     // x(0)

    // value with the anchor convention x(node 0) = basepoint
    std::array<double, 4> value(int j1, int j2) const;
    // period vector over a lattice vector: V^k(gamma) = 2 Re(c_k gamma)
    std::array<double, 4> period(cplx gamma) const;
};

struct WeierstrassForms {
    std::array<PeriodicField, 4> f;
};

// f1 = (i/2)(conj(phi2 psi2) + phi1 psi1), f2 = (1/2)(conj(phi2 psi2) - phi1 psi1),
// f3 = (1/2)(conj(phi2) psi1 + phi1 conj(psi2)), f4 = (i/2)(conj(phi2) psi1 - phi1 conj(psi2)).
// Throws NonPeriodicProduct when a product multiplier deviates from 1 by > tol.
WeierstrassForms forms_from_spinors(const WeierstrassData& data, double tol = 1e-9);

// max over k and nodes of |Im(dbar f_k)|, normalized by max|dbar f_k| + eps.
double closedness_residual(const WeierstrassForms& forms);
double closedness_max_imag(const WeierstrassForms& forms); // unnormalized numerator

struct ClosureReport {
    std::array<std::array<double, 2>, 4> period_vectors{}; // V^k over (gamma1, gamma2)
    std::array<cplx, 4> closure_integrals{}; // means of conj(psi1 phi1), conj(psi1) phi2,
                                             // psi2 conj(phi1), psi2 phi2
    double closedness = 0.0;
    double max_period() const;
    double max_closure_integral() const;
};

ClosureReport closure_report(const WeierstrassData& data, double tol = 1e-9);

// x^k = x^k(0) + int eta_k; linear part from the form means, periodic part
// solved mode-wise from f = d x with reality enforced.
Immersion integrate_surface(const WeierstrassForms& forms,
                            std::array<double, 4> basepoint,
                            double closedness_tol = 1e-8);

struct MetricCurvature {
    PeriodicField e2alpha; // induced metric factor (real)
    PeriodicField h_norm;  // |H| from spectral x_{z zbar} (real)
    double potential_defect = 0.0; // max | |U| - |H| e^alpha / 2 |
};

MetricCurvature metric_and_curvature(const WeierstrassData& data, const Immersion& x);

// W = 4 area mean(|U|^2)
double willmore(const PeriodicField& U);
// Independent route: W = integral |H|^2 dmu over the immersion
double willmore_from_immersion(const MetricCurvature& mc, double area);

// Flat conformal torus: unit-speed closed plane curve times the unit circle,
//   x(u, v) = (f(u), g(u), cos v, sin v),
// with turning angle theta(u) = u + eps1 sin(2u) + eps2 cos(4u). Even
// harmonics keep the curve closed for any eps, so the immersion is exact to
// spectral accuracy. eps = 0 recovers the product torus.
Immersion curve_torus_immersion(const GridPtr& grid, double eps1, double eps2 = 0.0);

} // namespace dst
