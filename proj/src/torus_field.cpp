#include "dstlab/torus_field.hpp"

#include "dstlab/fft.hpp"
#include "dstlab/par.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dst {

GridPtr make_lattice(cplx gamma1, cplx gamma2, int n1, int n2) {
    if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0)
        throw DomainError("sample counts must be even and >= 8");
    double ar = (std::conj(gamma1) * gamma2).imag();
    double scale = std::abs(gamma1) * std::abs(gamma2);
    if (scale == 0.0 || std::abs(ar) < 1e-14 * scale)
        throw DegenerateLattice("generators are real-collinear");
    auto g = std::make_shared<TorusGrid>();
    g->swapped = ar < 0.0;
    if (g->swapped) {
        std::swap(gamma1, gamma2);
        std::swap(n1, n2);
        ar = -ar;
    }
    g->gamma1 = gamma1;
    g->gamma2 = gamma2;
    g->n1 = n1;
    g->n2 = n2;
    g->area = ar;
    // <dual_i, gamma_j> = delta_ij: explicit 2x2 inverse
    g->dual1 = {gamma2.imag() / ar, -gamma2.real() / ar};
    g->dual2 = {-gamma1.imag() / ar, gamma1.real() / ar};
    return g;
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (!a || !b || !a->same_as(*b)) throw GridMismatch("fields live on different grids");
}

int wrap_index(int m, int n) {
    int r = m % n;
    return r < 0 ? r + n : r;
}

int signed_mode(int idx, int n) { return idx < (n + 1) / 2 ? idx : idx - n; }

std::vector<cplx> to_modes(const PeriodicField& f) {
    std::vector<cplx> m = f.v;
    fftcore::fft2d(m.data(), f.grid->n1, f.grid->n2, false);
    const double inv = 1.0 / f.grid->size();
    for (auto& x : m) x *= inv;
    return m;
}

PeriodicField from_modes(const GridPtr& g, std::span<const cplx> modes) {
    PeriodicField f(g);
    std::copy(modes.begin(), modes.end(), f.v.begin());
    fftcore::fft2d(f.v.data(), g->n1, g->n2, true);
    return f;
}

PeriodicField field_from_mode_list(
    const GridPtr& g, std::span<const std::pair<std::array<int, 2>, cplx>> modes) {
    std::vector<cplx> m(static_cast<size_t>(g->size()), 0.0);
    for (const auto& [mm, amp] : modes) {
        int i1 = wrap_index(mm[0], g->n1), i2 = wrap_index(mm[1], g->n2);
        m[static_cast<size_t>(i1 + g->n1 * i2)] += amp;
    }
    return from_modes(g, m);
}

namespace {

template <class SymbolFn>
PeriodicField apply_symbol(const PeriodicField& f, SymbolFn&& sym) {
    auto m = to_modes(f);
    const int n1 = f.grid->n1, n2 = f.grid->n2;
    for (int i2 = 0; i2 < n2; ++i2) {
        int m2 = signed_mode(i2, n2);
        for (int i1 = 0; i1 < n1; ++i1) {
            int m1 = signed_mode(i1, n1);
            m[static_cast<size_t>(i1 + n1 * i2)] *= sym(m1, m2);
        }
    }
    return from_modes(f.grid, m);
}

cplx pow_int(cplx z, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

} // namespace

PeriodicField derivative(const PeriodicField& f, Der which, int order) {
    if (order < 1) throw DomainError("derivative order must be >= 1");
    return apply_symbol(f, [&](int m1, int m2) {
        cplx s = which == Der::d ? f.grid->sym_d(m1, m2) : f.grid->sym_dbar(m1, m2);
        return pow_int(s, order);
    });
}

PeriodicField inverse_derivative_zero_mean(const PeriodicField& f, Der which) {
    return apply_symbol(f, [&](int m1, int m2) -> cplx {
        if (m1 == 0 && m2 == 0) return 0.0;
        cplx s = which == Der::d ? f.grid->sym_d(m1, m2) : f.grid->sym_dbar(m1, m2);
        return 1.0 / s;
    });
}

Moments moments(const PeriodicField& f) {
    cplx sum = 0.0;
    for (const auto& x : f.v) sum += x;
    Moments mo;
    mo.mean = sum / double(f.grid->size());
    mo.integral_dA = mo.mean * f.grid->area;
    mo.integral_dzdzbar = cplx(0.0, -2.0) * mo.integral_dA;
    return mo;
}

PeriodicField dealias(const PeriodicField& f) {
    auto m = to_modes(f);
    const int n1 = f.grid->n1, n2 = f.grid->n2;
    const int b1 = f.grid->dealias_max1(), b2 = f.grid->dealias_max2();
    for (int i2 = 0; i2 < n2; ++i2) {
        int m2 = signed_mode(i2, n2);
        for (int i1 = 0; i1 < n1; ++i1) {
            int m1 = signed_mode(i1, n1);
            if (std::abs(m1) > b1 || std::abs(m2) > b2) m[static_cast<size_t>(i1 + n1 * i2)] = 0.0;
        }
    }
    return from_modes(f.grid, m);
}

PeriodicField product(const PeriodicField& f, const PeriodicField& g) {
    require_same_grid(f.grid, g.grid);
    PeriodicField a = dealias(f), b = dealias(g);
    PeriodicField out(f.grid);
    const int n = f.grid->size();
    for (int i = 0; i < n; ++i) out.v[static_cast<size_t>(i)] = a.v[static_cast<size_t>(i)] * b.v[static_cast<size_t>(i)];
    return dealias(out);
}

PeriodicField conj_field(const PeriodicField& f) {
    PeriodicField out(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = std::conj(f.v[i]);
    return out;
}

PeriodicField real_part(const PeriodicField& f) {
    PeriodicField out(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i].real();
    return out;
}

PeriodicField imag_part(const PeriodicField& f) {
    PeriodicField out(f.grid);
    for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i].imag();
    return out;
}

PeriodicField abs2(const PeriodicField& f) { return product(f, conj_field(f)); }

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b) {
    require_same_grid(a.grid, b.grid);
    PeriodicField out = a;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

PeriodicField operator-(const PeriodicField& a, const PeriodicField& b) {
    require_same_grid(a.grid, b.grid);
    PeriodicField out = a;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

PeriodicField operator*(cplx s, const PeriodicField& a) {
    PeriodicField out = a;
    for (auto& x : out.v) x *= s;
    return out;
}

PeriodicField& operator+=(PeriodicField& a, const PeriodicField& b) {
    require_same_grid(a.grid, b.grid);
    for (size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}

double max_abs(const PeriodicField& f) {
    double m = 0.0;
    for (const auto& x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_imag(const PeriodicField& f) {
    double m = 0.0;
    for (const auto& x : f.v) m = std::max(m, std::abs(x.imag()));
    return m;
}

PeriodicField random_band_limited(const GridPtr& g, int max_mode, double amplitude,
                                  std::uint64_t seed, bool real_valued) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<cplx> m(static_cast<size_t>(g->size()), 0.0);
    const int b1 = std::min(max_mode, g->dealias_max1());
    const int b2 = std::min(max_mode, g->dealias_max2());
    for (int m2 = -b2; m2 <= b2; ++m2) {
        for (int m1 = -b1; m1 <= b1; ++m1) {
            if (m1 == 0 && m2 == 0) continue;
            cplx amp(unit(rng), unit(rng));
            size_t idx = static_cast<size_t>(wrap_index(m1, g->n1) + g->n1 * wrap_index(m2, g->n2));
            if (real_valued) {
                size_t cdx = static_cast<size_t>(wrap_index(-m1, g->n1) + g->n1 * wrap_index(-m2, g->n2));
                m[idx] += 0.5 * amp;
                m[cdx] += 0.5 * std::conj(amp);
            } else {
                m[idx] = amp;
            }
        }
    }
    PeriodicField f = from_modes(g, m);
    double scale = max_abs(f);
    if (scale > 0.0) f = cplx(amplitude / scale, 0.0) * f;
    return f;
}

// ---------------------------------------------------------------------------
// Quasi-periodic fields
// ---------------------------------------------------------------------------

std::vector<cplx> QuasiPeriodicField::values() const {
    const auto& g = *part.grid;
    std::vector<cplx> out(static_cast<size_t>(g.size()));
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1)
            out[static_cast<size_t>(j1 + g.n1 * j2)] = value_at(j1, j2);
    return out;
}

bool exponent_is_periodic(const TorusGrid& g, cplx lambda, cplx rho, double tol) {
    cplx m1 = std::exp(lambda * g.gamma1 + rho * std::conj(g.gamma1));
    cplx m2 = std::exp(lambda * g.gamma2 + rho * std::conj(g.gamma2));
    return std::abs(m1 - 1.0) <= tol && std::abs(m2 - 1.0) <= tol;
}

QPF renormalized(const QPF& f, cplx new_lambda, cplx new_rho, double tol) {
    cplx dl = f.lambda - new_lambda, dr = f.rho - new_rho;
    if (dl == 0.0 && dr == 0.0) return f;
    const auto& g = *f.part.grid;
    if (!exponent_is_periodic(g, dl, dr, tol))
        throw NonPeriodicProduct("exponent shift is not periodic; cannot renormalize");
    PeriodicField p(f.part.grid);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            cplx z = g.node(j1, j2);
            p.at(j1, j2) = std::exp(dl * z + dr * std::conj(z)) * f.part.at(j1, j2);
        }
    return QPF(new_lambda, new_rho, dealias(p));
}

QPF derivative(const QPF& f, Der which, int order) {
    if (order < 1) throw DomainError("derivative order must be >= 1");
    cplx shift = which == Der::d ? f.lambda : f.rho;
    auto m = to_modes(f.part);
    const int n1 = f.part.grid->n1, n2 = f.part.grid->n2;
    for (int i2 = 0; i2 < n2; ++i2) {
        int m2 = signed_mode(i2, n2);
        for (int i1 = 0; i1 < n1; ++i1) {
            int m1 = signed_mode(i1, n1);
            cplx s = (which == Der::d ? f.part.grid->sym_d(m1, m2)
                                      : f.part.grid->sym_dbar(m1, m2)) + shift;
            cplx p = 1.0;
            for (int k = 0; k < order; ++k) p *= s;
            m[static_cast<size_t>(i1 + n1 * i2)] *= p;
        }
    }
    return QPF(f.lambda, f.rho, from_modes(f.part.grid, m));
}

QPF product(const QPF& f, const QPF& g) {
    return QPF(f.lambda + g.lambda, f.rho + g.rho, product(f.part, g.part));
}

QPF product(const QPF& f, const PeriodicField& g) {
    return QPF(f.lambda, f.rho, product(f.part, g));
}

QPF conj_qpf(const QPF& f) {
    return QPF(std::conj(f.rho), std::conj(f.lambda), conj_field(f.part));
}

QPF operator+(const QPF& a, const QPF& b) {
    if (a.lambda != b.lambda || a.rho != b.rho)
        throw DomainError("adding quasi-periodic fields with different exponents");
    return QPF(a.lambda, a.rho, a.part + b.part);
}

QPF operator-(const QPF& a, const QPF& b) {
    if (a.lambda != b.lambda || a.rho != b.rho)
        throw DomainError("subtracting quasi-periodic fields with different exponents");
    return QPF(a.lambda, a.rho, a.part - b.part);
}

QPF operator*(cplx s, const QPF& a) { return QPF(a.lambda, a.rho, s * a.part); }

PeriodicField as_periodic(const QPF& f, double tol) {
    const auto& g = *f.part.grid;
    if (f.lambda == 0.0 && f.rho == 0.0) return f.part;
    cplx m1 = f.multiplier(g.gamma1), m2 = f.multiplier(g.gamma2);
    if (std::abs(m1 - 1.0) > tol || std::abs(m2 - 1.0) > tol)
        throw NonPeriodicProduct("multipliers deviate from 1: |m1-1|=" +
                                 std::to_string(std::abs(m1 - 1.0)) + ", |m2-1|=" +
                                 std::to_string(std::abs(m2 - 1.0)));
    PeriodicField out(f.part.grid);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) out.at(j1, j2) = f.value_at(j1, j2);
    return dealias(out);
}

QPF as_qpf(const PeriodicField& f) { return QPF(0.0, 0.0, f); }

double max_abs(const QPF& f) {
    double m = 0.0;
    const auto& g = *f.part.grid;
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) m = std::max(m, std::abs(f.value_at(j1, j2)));
    return m;
}

} // namespace dst
