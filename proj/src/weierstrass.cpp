#include "dstlab/weierstrass.hpp"

#include "dstlab/fft.hpp"

#include <cmath>

namespace dst {

std::array<double, 4> Immersion::value(int j1, int j2) const {
    std::array<double, 4> out{};
    cplx z = grid->node(j1, j2);
    for (int k = 0; k < 4; ++k) {
        double lin = 2.0 * (linear[static_cast<size_t>(k)] * z).real();
        double per = periodic[static_cast<size_t>(k)].at(j1, j2).real() -
                     periodic[static_cast<size_t>(k)].at(0, 0).real();
        out[static_cast<size_t>(k)] = basepoint[static_cast<size_t>(k)] + per + lin;
    }
    return out;
}

std::array<double, 4> Immersion::period(cplx gamma) const {
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k)
        out[static_cast<size_t>(k)] = 2.0 * (linear[static_cast<size_t>(k)] * gamma).real();
    return out;
}

WeierstrassForms forms_from_spinors(const WeierstrassData& data, double tol) {
    require_weierstrass_consistent(data, tol);
    const cplx ih(0.0, 0.5);

    PeriodicField a = as_periodic(product(data.phi.c1, data.psi.c1), tol); // phi1 psi1
    PeriodicField b = as_periodic(conj_qpf(product(data.phi.c2, data.psi.c2)), tol);
    PeriodicField c = as_periodic(product(conj_qpf(data.phi.c2), data.psi.c1), tol);
    PeriodicField d = as_periodic(product(data.phi.c1, conj_qpf(data.psi.c2)), tol);

    WeierstrassForms out;
    out.f[0] = ih * (b + a);
    out.f[1] = cplx(0.5) * (b - a);
    out.f[2] = cplx(0.5) * (c + d);
    out.f[3] = ih * (c - d);
    return out;
}

double closedness_max_imag(const WeierstrassForms& forms) {
    double num = 0.0;
    for (const auto& f : forms.f) num = std::max(num, max_abs_imag(derivative(f, Der::dbar)));
    return num;
}

double closedness_residual(const WeierstrassForms& forms) {
    double num = 0.0, den = 0.0;
    for (const auto& f : forms.f) {
        PeriodicField df = derivative(f, Der::dbar);
        num = std::max(num, max_abs_imag(df));
        den = std::max(den, max_abs(df));
    }
    return num / (den + 1e-30);
}

double ClosureReport::max_period() const {
    double m = 0.0;
    for (const auto& vk : period_vectors)
        for (double v : vk) m = std::max(m, std::abs(v));
    return m;
}

double ClosureReport::max_closure_integral() const {
    double m = 0.0;
    for (const auto& j : closure_integrals) m = std::max(m, std::abs(j));
    return m;
}

ClosureReport closure_report(const WeierstrassData& data, double tol) {
    WeierstrassForms forms = forms_from_spinors(data, tol);
    ClosureReport rep;
    const auto& g = *data.grid();
    for (int k = 0; k < 4; ++k) {
        cplx mean = moments(forms.f[static_cast<size_t>(k)]).mean;
        rep.period_vectors[static_cast<size_t>(k)] = {2.0 * (mean * g.gamma1).real(),
                                                      2.0 * (mean * g.gamma2).real()};
    }
    // genus-1 closure integrals with omega = dz: means of the four products
    rep.closure_integrals[0] =
        moments(as_periodic(product(conj_qpf(data.psi.c1), conj_qpf(data.phi.c1)), tol)).mean;
    rep.closure_integrals[1] =
        moments(as_periodic(product(conj_qpf(data.psi.c1), data.phi.c2), tol)).mean;
    rep.closure_integrals[2] =
        moments(as_periodic(product(data.psi.c2, conj_qpf(data.phi.c1)), tol)).mean;
    rep.closure_integrals[3] =
        moments(as_periodic(product(data.psi.c2, data.phi.c2), tol)).mean;
    rep.closedness = closedness_residual(forms);
    return rep;
}

Immersion integrate_surface(const WeierstrassForms& forms, std::array<double, 4> basepoint,
                            double closedness_tol) {
    double res = closedness_residual(forms);
    if (res > closedness_tol)
        throw NotClosed("closedness residual " + std::to_string(res) + " above tolerance");

    const GridPtr& grid = forms.f[0].grid;
    const int n1 = grid->n1, n2 = grid->n2;
    Immersion x;
    x.grid = grid;
    x.basepoint = basepoint;
    for (int k = 0; k < 4; ++k) {
        auto m = to_modes(forms.f[static_cast<size_t>(k)]);
        x.linear[static_cast<size_t>(k)] = m[0];
        std::vector<cplx> xm(m.size(), 0.0);
        for (int i2 = 0; i2 < n2; ++i2) {
            int m2 = signed_mode(i2, n2);
            for (int i1 = 0; i1 < n1; ++i1) {
                int m1 = signed_mode(i1, n1);
                if (m1 == 0 && m2 == 0) continue;
                if (m1 == -n1 / 2 || m2 == -n2 / 2) continue; // unpaired Nyquist
                xm[static_cast<size_t>(i1 + n1 * i2)] =
                    m[static_cast<size_t>(i1 + n1 * i2)] / grid->sym_d(m1, m2);
            }
        }
        // reality: hat(x)(-m) = conj(hat(x)(m))
        std::vector<cplx> sym(xm.size());
        for (int i2 = 0; i2 < n2; ++i2)
            for (int i1 = 0; i1 < n1; ++i1) {
                int r1 = wrap_index(-signed_mode(i1, n1), n1);
                int r2 = wrap_index(-signed_mode(i2, n2), n2);
                sym[static_cast<size_t>(i1 + n1 * i2)] =
                    0.5 * (xm[static_cast<size_t>(i1 + n1 * i2)] +
                           std::conj(xm[static_cast<size_t>(r1 + n1 * r2)]));
            }
        x.periodic[static_cast<size_t>(k)] = real_part(from_modes(grid, sym));
    }
    return x;
}

MetricCurvature metric_and_curvature(const WeierstrassData& data, const Immersion& x) {
    require_same_grid(data.grid(), x.grid);
    const auto& g = *x.grid;
    MetricCurvature mc;
    mc.e2alpha = PeriodicField(x.grid);
    mc.h_norm = PeriodicField(x.grid);

    // e^{2 alpha} = (|psi1|^2 + |psi2|^2)(|phi1|^2 + |phi2|^2), evaluated
    // pointwise with the quasi-periodic prefactors included
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            double np = std::norm(data.psi.c1.value_at(j1, j2)) +
                        std::norm(data.psi.c2.value_at(j1, j2));
            double nf = std::norm(data.phi.c1.value_at(j1, j2)) +
                        std::norm(data.phi.c2.value_at(j1, j2));
            double e2a = np * nf;
            if (e2a < 1e-12)
                throw DegenerateMetric("metric factor vanishes at a node");
            mc.e2alpha.at(j1, j2) = e2a;
        }

    // H = 2 x_{z zbar} / e^{2 alpha}; the linear part has no mixed derivative
    std::array<PeriodicField, 4> lap;
    for (int k = 0; k < 4; ++k)
        lap[static_cast<size_t>(k)] =
            derivative(derivative(x.periodic[static_cast<size_t>(k)], Der::d), Der::dbar);
    double defect = 0.0;
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) {
                double v = lap[static_cast<size_t>(k)].at(j1, j2).real();
                s += v * v;
            }
            double e2a = mc.e2alpha.at(j1, j2).real();
            double hn = 2.0 * std::sqrt(s) / e2a;
            mc.h_norm.at(j1, j2) = hn;
            double u_abs = std::abs(data.U.at(j1, j2));
            defect = std::max(defect, std::abs(u_abs - hn * std::sqrt(e2a) / 2.0));
        }
    mc.potential_defect = defect;
    return mc;
}

double willmore(const PeriodicField& U) {
    return 4.0 * U.grid->area * moments(abs2(U)).mean.real();
}

Immersion curve_torus_immersion(const GridPtr& grid, double eps1, double eps2) {
    const auto& g = *grid;
    // turning angle and its closed unit-speed curve, built along direction 1
    std::vector<cplx> tangent(static_cast<size_t>(g.n1));
    for (int j1 = 0; j1 < g.n1; ++j1) {
        double u = kTwoPi * j1 / g.n1;
        double theta = u + eps1 * std::sin(2.0 * u) + eps2 * std::cos(4.0 * u);
        tangent[static_cast<size_t>(j1)] = std::polar(1.0, theta);
    }
    // periodic antiderivative: divide modes by i m (the zero mode vanishes
    // because the curve closes)
    std::vector<cplx> modes = tangent;
    fftcore::fft(modes, false);
    for (auto& m : modes) m /= double(g.n1);
    if (std::abs(modes[0]) > 1e-12)
        throw DomainError("curve tangent has nonzero mean; the curve does not close");
    std::vector<cplx> curve(static_cast<size_t>(g.n1), 0.0);
    for (int i = 1; i < g.n1; ++i) {
        int m = signed_mode(i, g.n1);
        if (m == -g.n1 / 2) continue;
        curve[static_cast<size_t>(i)] = modes[static_cast<size_t>(i)] / cplx(0.0, double(m));
    }
    fftcore::fft(curve, true);

    Immersion x;
    x.grid = grid;
    for (int k = 0; k < 4; ++k) x.periodic[static_cast<size_t>(k)] = PeriodicField(grid);
    cplx mean_curve = 0.0;
    for (const auto& c : curve) mean_curve += c;
    mean_curve /= double(g.n1);
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            double v = kTwoPi * j2 / g.n2;
            cplx c = curve[static_cast<size_t>(j1)] - mean_curve;
            x.periodic[0].at(j1, j2) = c.real();
            x.periodic[1].at(j1, j2) = c.imag();
            x.periodic[2].at(j1, j2) = std::cos(v);
            x.periodic[3].at(j1, j2) = std::sin(v);
        }
    x.basepoint = {x.periodic[0].at(0, 0).real(), x.periodic[1].at(0, 0).real(), 1.0, 0.0};
    return x;
}

double willmore_from_immersion(const MetricCurvature& mc, double area) {
    // integral |H|^2 e^{2 alpha} dx dy as a plain node average
    double acc = 0.0;
    const auto& g = *mc.e2alpha.grid;
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            double h = mc.h_norm.at(j1, j2).real();
            acc += h * h * mc.e2alpha.at(j1, j2).real();
        }
    return acc / g.size() * area;
}

} // namespace dst
