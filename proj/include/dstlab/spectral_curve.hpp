#pragma once

// Zero-energy Floquet analysis of the double-periodic Dirac operator:
// truncated Bloch matrices over quasimomenta, the dispersion residual
// (smallest singular value), zero-set tracing in one dual-lattice cell,
// multipliers and the gauge action on them, and nullspace extraction used to
// manufacture spinors for a given potential.
//
// Quasimomenta (k1, k2) enter as prefactor exponents
//   lambda = pi (i k1 + k2),  rho = pi (i k1 - k2),
// so the multiplier over gamma is exp(2 pi i (k1 Re gamma + k2 Im gamma)).

#include "dstlab/dirac.hpp"
#include "dstlab/linalg.hpp"
#include "dstlab/torus_field.hpp"

#include <array>
#include <memory>
#include <vector>

namespace dst {

std::array<cplx, 2> bloch_exponents(std::array<double, 2> k);

// Dense truncated matrix of D (or Dvee when vee) on
// e^{2 pi i (k1 x + k2 y)} (truncated Fourier)^2; modes |m1|,|m2| <= cutoff.
// Column order: psi1 coefficients then psi2; rows: first Dirac row then second.
la::Mat assemble_bloch(const PeriodicField& U, std::array<double, 2> k, int cutoff,
                       bool vee = false);
la::Mat assemble_bloch_exponents(const PeriodicField& U, cplx lambda, cplx rho, int cutoff,
                                 bool vee = false);

// sigma_min / sigma_max of the truncated Bloch matrix.
double dispersion_residual(const PeriodicField& U, std::array<double, 2> k, int cutoff);

struct SpectralSample {
    double k1 = 0.0, k2 = 0.0;
    double sigma_min = 0.0;
    cplx mu1, mu2;
};

struct ScanWindow {
    double k1_min = 0.0, k2_min = 0.0, k1_max = 0.0, k2_max = 0.0;
};
// one dual-lattice cell of the square-lattice fixture
ScanWindow dual_cell_window(const TorusGrid& g);

struct ScanOptions {
    int resolution1 = 64, resolution2 = 64;
    int cutoff = 8;
    double threshold = 1e-6;        // accept sigma_min < threshold * sigma_max
    double refine_fraction = 1e-3;  // bisection target as a fraction of a scan cell
};

struct ScanResult {
    std::vector<SpectralSample> samples; // sorted by (k1, k2)
    bool empty_zero_set = false;
    double sigma_max = 0.0;
};

// Grid scan of the determinant phase plus bisection refinement along edges
// where the phase flips; refined points are kept when the singular value
// clears the threshold. An empty result is reported, not thrown.
ScanResult scan_zero_set(const PeriodicField& U, const ScanWindow& window,
                         const ScanOptions& opt);

cplx floquet_multiplier(const TorusGrid& g, std::array<double, 2> k, cplx gamma);

struct GaugedMultipliers {
    std::array<cplx, 2> mu;
    std::array<cplx, 2> mu_gauged; // mu_j * e^{-a gamma_j}
};
GaugedMultipliers multipliers_with_gauge(const SpectralSample& s, cplx a, const TorusGrid& g);

struct NullspaceResult {
    SpinorPair spinor;
    double sigma = 0.0;     // singular value at the sample
    double gap_ratio = 0.0; // second smallest / smallest
    bool near_degenerate = false;
};

// Right singular vector of the smallest singular value, repackaged as a
// quasi-periodic spinor. Throws NotOnCurve when the dispersion residual at k
// exceeds tol. vee = true solves Dvee instead (used for phi).
NullspaceResult floquet_nullspace(const PeriodicField& U, std::array<double, 2> k, int cutoff,
                                  double tol = 1e-6, bool vee = false);
NullspaceResult nullspace_at_exponents(const PeriodicField& U, cplx lambda, cplx rho,
                                       int cutoff, bool vee = false);

// Minimizes sigma_min over the torus-compatible exponent family
// lambda = lambda0 + G/2, rho = rho0 + conj(G)/2 (lambda - conj(rho) fixed).
struct AdmissibleSearchResult {
    cplx lambda, rho;
    double sigma = 0.0;
    bool converged = false;
};
AdmissibleSearchResult find_admissible_exponents(const PeriodicField& U, cplx lambda0,
                                                 cplx rho0, int cutoff,
                                                 double target_sigma = 1e-9);

// Full Weierstrass data for a given periodic potential: psi from the kernel of
// D on the admissible family through (lambda0, rho0), phi from the kernel of
// Dvee at the opposite exponents. Components are scaled to `amplitude` with a
// deterministic phase. Only genuine torus potentials carry such kernels;
// NotOnCurve is thrown when the search stalls above target_sigma.
WeierstrassData weierstrass_from_potential(const PeriodicField& U, cplx lambda0, cplx rho0,
                                           int cutoff, double amplitude = 0.70710678118654752440,
                                           double target_sigma = 1e-9);

// Shared scanner: precomputes the k-independent convolution blocks of the
// Bloch matrix and factorizes only the k-dependent Schur complement per
// sample. Falls back to the dense matrix when the potential block is
// ill-conditioned (e.g. U = 0).
class BlochScanner {
public:
    BlochScanner(const PeriodicField& U, int cutoff, bool vee = false);
    ~BlochScanner();
    BlochScanner(BlochScanner&&) noexcept;

    int dim() const; // 2 (2 cutoff + 1)^2

    double det_phase(cplx lambda, cplx rho) const;
    struct Sigma {
        double sigma_min = 0.0, sigma_max = 0.0, sigma2 = 0.0;
        std::vector<cplx> right_vector;
    };
    Sigma sigmas(cplx lambda, cplx rho, bool want_vector = false,
                 bool want_second = false, bool want_max = true) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace dst
