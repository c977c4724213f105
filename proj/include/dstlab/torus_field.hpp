#pragma once

// Spectral calculus on a torus C/Lambda: grids, plane-wave bases, the
// Wirtinger derivatives d/dz and d/dzbar, zero-mean spectral inverses,
// dealiased products, and quasi-periodic fields carrying an exponential
// prefactor exp(lambda z + rho zbar).

#include "dstlab/errors.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace dst {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.1415926535897932384626433832795;
inline constexpr double kTwoPi = 2.0 * kPi;

struct TorusGrid {
    cplx gamma1{}, gamma2{}; // lattice generators, oriented: Im(conj(g1) g2) > 0
    int n1 = 0, n2 = 0;      // samples per direction
    std::array<double, 2> dual1{}, dual2{}; // <dual_i, gamma_j> = delta_ij
    double area = 0.0;                      // Im(conj(g1) g2)
    bool swapped = false;                   // generators swapped to fix orientation

    int size() const { return n1 * n2; }
    // node (j1,j2) sits at z = (j1/n1) g1 + (j2/n2) g2
    cplx node(int j1, int j2) const {
        return gamma1 * (double(j1) / n1) + gamma2 * (double(j2) / n2);
    }
    // lattice coordinates (u1,u2) of a point z, so z = u1 g1 + u2 g2
    std::array<double, 2> lattice_coords(cplx z) const {
        return {dual1[0] * z.real() + dual1[1] * z.imag(),
                dual2[0] * z.real() + dual2[1] * z.imag()};
    }
    // wavevector of mode (m1,m2): kappa = 2 pi (m1 dual1 + m2 dual2)
    std::array<double, 2> wavevector(int m1, int m2) const {
        return {kTwoPi * (m1 * dual1[0] + m2 * dual2[0]),
                kTwoPi * (m1 * dual1[1] + m2 * dual2[1])};
    }
    // symbols of the Wirtinger derivatives on plane waves
    cplx sym_d(int m1, int m2) const {
        auto k = wavevector(m1, m2);
        return cplx(0.0, 0.5) * cplx(k[0], -k[1]);
    }
    cplx sym_dbar(int m1, int m2) const {
        auto k = wavevector(m1, m2);
        return cplx(0.0, 0.5) * cplx(k[0], k[1]);
    }
    int dealias_max1() const { return n1 / 3; }
    int dealias_max2() const { return n2 / 3; }
    bool same_as(const TorusGrid& o) const {
        return gamma1 == o.gamma1 && gamma2 == o.gamma2 && n1 == o.n1 && n2 == o.n2;
    }
};

using GridPtr = std::shared_ptr<const TorusGrid>;

// Builds an oriented grid; swaps the generators (recording the swap) if the
// given pair is negatively oriented. Throws DegenerateLattice for
// real-collinear generators, DomainError for bad sample counts.
GridPtr make_lattice(cplx gamma1, cplx gamma2, int n1, int n2);

void require_same_grid(const GridPtr& a, const GridPtr& b);

enum class Der { d, dbar };

// ---------------------------------------------------------------------------
// Periodic fields
// ---------------------------------------------------------------------------

struct PeriodicField {
    GridPtr grid;
    std::vector<cplx> v; // node values, index j1 + n1*j2

    PeriodicField() = default;
    explicit PeriodicField(GridPtr g, cplx fill = 0.0)
        : grid(std::move(g)), v(static_cast<size_t>(grid->size()), fill) {}

    cplx& at(int j1, int j2) { return v[static_cast<size_t>(j1 + grid->n1 * j2)]; }
    cplx at(int j1, int j2) const { return v[static_cast<size_t>(j1 + grid->n1 * j2)]; }
};

// Fourier layout helpers. Modes use the same row-major layout as values;
// index i along a direction of length n stands for the signed mode
// i < (n+1)/2 ? i : i - n.
int wrap_index(int m, int n);        // signed mode -> fft index
int signed_mode(int idx, int n);     // fft index -> signed mode

std::vector<cplx> to_modes(const PeriodicField& f); // normalized; modes[0] = mean
PeriodicField from_modes(const GridPtr& g, std::span<const cplx> modes);
PeriodicField field_from_mode_list(
    const GridPtr& g, std::span<const std::pair<std::array<int, 2>, cplx>> modes);

PeriodicField derivative(const PeriodicField& f, Der which, int order = 1);
// Spectral inverse with the zero mode of the result set to 0; the mean of the
// input is projected out first.
PeriodicField inverse_derivative_zero_mean(const PeriodicField& f, Der which);

struct Moments {
    cplx mean;
    cplx integral_dA;       // mean * area
    cplx integral_dzdzbar;  // -2i * integral_dA  (dz ^ dzbar = -2i dx ^ dy)
};
Moments moments(const PeriodicField& f);

// Pointwise product with 2/3-rule dealiasing (inputs and result filtered).
PeriodicField product(const PeriodicField& f, const PeriodicField& g);
PeriodicField dealias(const PeriodicField& f);

PeriodicField conj_field(const PeriodicField& f);
PeriodicField real_part(const PeriodicField& f);
PeriodicField imag_part(const PeriodicField& f);
PeriodicField abs2(const PeriodicField& f); // dealiased |f|^2

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator-(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator*(cplx s, const PeriodicField& a);
PeriodicField& operator+=(PeriodicField& a, const PeriodicField& b);

double max_abs(const PeriodicField& f);
double max_abs_imag(const PeriodicField& f);

// Random field supported on modes |m1|,|m2| <= max_mode (zero mode excluded),
// scaled so max|f| is close to amplitude. real_valued enforces Hermitian modes.
PeriodicField random_band_limited(const GridPtr& g, int max_mode, double amplitude,
                                  std::uint64_t seed, bool real_valued = false);

// ---------------------------------------------------------------------------
// Quasi-periodic fields: value(z) = exp(lambda z + rho zbar) * part(z)
// ---------------------------------------------------------------------------

struct QuasiPeriodicField {
    cplx lambda{}, rho{};
    PeriodicField part;

    QuasiPeriodicField() = default;
    QuasiPeriodicField(cplx l, cplx r, PeriodicField p)
        : lambda(l), rho(r), part(std::move(p)) {}

    const GridPtr& grid() const { return part.grid; }
    cplx prefactor(cplx z) const { return std::exp(lambda * z + rho * std::conj(z)); }
    cplx value_at(int j1, int j2) const {
        return prefactor(part.grid->node(j1, j2)) * part.at(j1, j2);
    }
    std::vector<cplx> values() const;
    // multiplier over a lattice vector: exp(lambda gamma + rho conj(gamma))
    cplx multiplier(cplx gamma) const {
        return std::exp(lambda * gamma + rho * std::conj(gamma));
    }
};

using QPF = QuasiPeriodicField;

// exp((lambda - new_lambda) z + (rho - new_rho) zbar) must be periodic (unit
// multipliers within tol); the factor is folded pointwise into the part.
QPF renormalized(const QPF& f, cplx new_lambda, cplx new_rho, double tol = 1e-9);
bool exponent_is_periodic(const TorusGrid& g, cplx lambda, cplx rho, double tol = 1e-9);

QPF derivative(const QPF& f, Der which, int order = 1); // (d + lambda) on the part
QPF product(const QPF& f, const QPF& g);                // exponents add
QPF product(const QPF& f, const PeriodicField& g);
QPF conj_qpf(const QPF& f);
QPF operator+(const QPF& a, const QPF& b); // exponents must match exactly
QPF operator-(const QPF& a, const QPF& b);
QPF operator*(cplx s, const QPF& a);

// Requires unit multipliers; evaluates the prefactor on nodes and returns the
// dealiased periodic field. Throws NonPeriodicProduct otherwise.
PeriodicField as_periodic(const QPF& f, double tol = 1e-9);
QPF as_qpf(const PeriodicField& f); // exponents (0,0)

double max_abs(const QPF& f);

} // namespace dst
