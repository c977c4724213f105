#include "dstlab/ds_flows.hpp"

#include <cmath>

namespace dst {

int flow_order(FlowLevel level) {
    switch (level) {
        case FlowLevel::ds1: return 1;
        case FlowLevel::ds2: return 2;
        default: return 3;
    }
}

Constraints solve_constraints(const PeriodicField& u, int order) {
    Constraints con;
    PeriodicField ub = conj_field(u);
    con.v = inverse_derivative_zero_mean(derivative(abs2(u), Der::d), Der::dbar);
    if (order >= 3) {
        con.w = derivative(inverse_derivative_zero_mean(product(ub, derivative(u, Der::d)), Der::dbar), Der::d);
        con.wp = derivative(inverse_derivative_zero_mean(product(ub, derivative(u, Der::dbar)), Der::d), Der::dbar);
    } else {
        con.w = PeriodicField(u.grid);
        con.wp = PeriodicField(u.grid);
    }
    return con;
}

QPF flow_rhs_qpf(const QPF& u, const Constraints& con, FlowLevel level, cplx w_shift,
                 cplx wp_shift) {
    const GridPtr& grid = u.grid();
    switch (level) {
        case FlowLevel::ds1:
            return derivative(u, Der::d) + derivative(u, Der::dbar);
        case FlowLevel::ds2: {
            PeriodicField vv = con.v + conj_field(con.v);
            QPF lin = derivative(u, Der::d, 2) + derivative(u, Der::dbar, 2);
            return cplx(0.0, 1.0) * (lin + cplx(2.0) * product(u, vv));
        }
        case FlowLevel::ds3: {
            QPF out = derivative(u, Der::d, 3) + derivative(u, Der::dbar, 3);
            out = out + cplx(3.0) * product(derivative(u, Der::d), con.v);
            out = out + cplx(3.0) * product(derivative(u, Der::dbar), conj_field(con.v));
            PeriodicField ww = con.w + con.wp;
            for (auto& x : ww.v) x += w_shift + wp_shift;
            return out + cplx(3.0) * product(u, ww);
        }
        case FlowLevel::mnv: {
            if (max_abs_imag(u.part) > 1e-10)
                throw MnvRequiresReal("mNV flow needs a real potential, max|Im u| = " +
                                      std::to_string(max_abs_imag(u.part)));
            QPF out = derivative(u, Der::d, 3) + derivative(u, Der::dbar, 3);
            out = out + cplx(3.0) * product(derivative(u, Der::d), con.v);
            out = out + cplx(3.0) * product(derivative(u, Der::dbar), conj_field(con.v));
            PeriodicField vz = derivative(con.v, Der::d) + derivative(conj_field(con.v), Der::dbar);
            return out + cplx(1.5) * product(u, vz);
        }
    }
    throw DomainError("unknown flow level");
}

PeriodicField flow_rhs(const PeriodicField& u, const Constraints& con, FlowLevel level,
                       cplx w_shift, cplx wp_shift) {
    return flow_rhs_qpf(as_qpf(u), con, level, w_shift, wp_shift).part;
}

TripleOperators make_triple_operators(const PeriodicField& u, const Constraints& con,
                                      int level, int sign, cplx w_shift, cplx wp_shift) {
    if (level < 1 || level > 3) throw DomainError("triple level must be 1, 2 or 3");
    TripleOperators ops;
    ops.level = level;
    ops.sign = sign;
    PeriodicField ub = conj_field(u);
    if (sign > 0) {
        ops.p = cplx(-1.0) * u;
        ops.q = ub;
    } else {
        ops.p = cplx(-1.0) * ub;
        ops.q = u;
    }
    if (level >= 2) {
        ops.v1 = cplx(2.0) * con.v;
        ops.v2 = cplx(2.0) * conj_field(con.v);
    }
    if (level == 3) {
        PeriodicField w = con.w, wp = con.wp;
        for (auto& x : w.v) x += w_shift;
        for (auto& x : wp.v) x += wp_shift;
        if (sign > 0) {
            ops.w1 = w - derivative(con.v, Der::d);
            ops.w2 = cplx(-1.0) * wp;
        } else {
            ops.w1 = cplx(-1.0) * w;
            ops.w2 = wp - derivative(conj_field(con.v), Der::dbar);
        }
    }
    return ops;
}

namespace {

QPF pm(const QPF& chi, const PeriodicField& coeff) { return product(chi, coeff); }

} // namespace

SpinorPair apply_L(const TripleOperators& ops, const SpinorPair& chi) {
    QPF r1 = cplx(-1.0) * pm(chi.c1, ops.p) + derivative(chi.c2, Der::d);
    QPF r2 = cplx(-1.0) * derivative(chi.c1, Der::dbar) + pm(chi.c2, ops.q);
    return SpinorPair(std::move(r1), std::move(r2));
}

SpinorPair apply_A(const TripleOperators& ops, const SpinorPair& chi) {
    const auto& x1 = chi.c1;
    const auto& x2 = chi.c2;
    switch (ops.level) {
        case 1: {
            QPF r1 = derivative(x1, Der::d) + pm(x2, ops.q);
            QPF r2 = pm(x1, ops.p) + derivative(x2, Der::dbar);
            return SpinorPair(std::move(r1), std::move(r2));
        }
        case 2: {
            QPF r1 = cplx(-1.0) * derivative(x1, Der::d, 2) - pm(x1, ops.v1) +
                     pm(derivative(x2, Der::dbar), ops.q) - pm(x2, derivative(ops.q, Der::dbar));
            QPF r2 = cplx(-1.0) * pm(derivative(x1, Der::d), ops.p) +
                     pm(x1, derivative(ops.p, Der::d)) + derivative(x2, Der::dbar, 2) +
                     pm(x2, ops.v2);
            return SpinorPair(std::move(r1), std::move(r2));
        }
        default: {
            PeriodicField q_zb = derivative(ops.q, Der::dbar);
            PeriodicField q_zbzb = derivative(ops.q, Der::dbar, 2);
            PeriodicField p_z = derivative(ops.p, Der::d);
            PeriodicField p_zz = derivative(ops.p, Der::d, 2);
            QPF r1 = derivative(x1, Der::d, 3) + cplx(1.5) * pm(derivative(x1, Der::d), ops.v1) -
                     cplx(3.0) * pm(x1, ops.w1) + pm(derivative(x2, Der::dbar, 2), ops.q) -
                     pm(derivative(x2, Der::dbar), q_zb) + pm(x2, q_zbzb) +
                     cplx(1.5) * pm(x2, product(ops.v2, ops.q));
            QPF r2 = pm(derivative(x1, Der::d, 2), ops.p) - pm(derivative(x1, Der::d), p_z) +
                     pm(x1, p_zz) + cplx(1.5) * pm(x1, product(ops.v1, ops.p)) +
                     derivative(x2, Der::dbar, 3) + cplx(1.5) * pm(derivative(x2, Der::dbar), ops.v2) -
                     cplx(3.0) * pm(x2, ops.w2);
            return SpinorPair(std::move(r1), std::move(r2));
        }
    }
}

SpinorPair apply_B(const TripleOperators& ops, const SpinorPair& chi) {
    const auto& x1 = chi.c1;
    const auto& x2 = chi.c2;
    PeriodicField pq = ops.p + ops.q;
    switch (ops.level) {
        case 1: {
            QPF r1 = derivative(x1, Der::dbar) - derivative(x1, Der::d) - pm(x2, pq);
            QPF r2 = cplx(-1.0) * pm(x1, pq) + derivative(x2, Der::d) - derivative(x2, Der::dbar);
            return SpinorPair(std::move(r1), std::move(r2));
        }
        case 2: {
            PeriodicField v12 = ops.v1 + ops.v2;
            PeriodicField p_zb = derivative(ops.p, Der::dbar);
            PeriodicField q_zb = derivative(ops.q, Der::dbar);
            PeriodicField p_z = derivative(ops.p, Der::d);
            PeriodicField q_z = derivative(ops.q, Der::d);
            QPF r1 = derivative(x1, Der::d, 2) + derivative(x1, Der::dbar, 2) + pm(x1, v12) -
                     pm(derivative(x2, Der::dbar), pq) + pm(x2, q_zb - cplx(2.0) * p_zb);
            QPF r2 = pm(derivative(x1, Der::d), pq) + pm(x1, cplx(2.0) * q_z - p_z) -
                     derivative(x2, Der::d, 2) - derivative(x2, Der::dbar, 2) - pm(x2, v12);
            return SpinorPair(std::move(r1), std::move(r2));
        }
        default: {
            PeriodicField p_z = derivative(ops.p, Der::d);
            PeriodicField q_z = derivative(ops.q, Der::d);
            PeriodicField p_zb = derivative(ops.p, Der::dbar);
            PeriodicField q_zb = derivative(ops.q, Der::dbar);
            PeriodicField p_zz = derivative(ops.p, Der::d, 2);
            PeriodicField q_zz = derivative(ops.q, Der::d, 2);
            PeriodicField p_zbzb = derivative(ops.p, Der::dbar, 2);
            PeriodicField q_zbzb = derivative(ops.q, Der::dbar, 2);
            PeriodicField w12 = ops.w1 - ops.w2;
            auto b11 = [&](const QPF& f) {
                return derivative(f, Der::dbar, 3) - derivative(f, Der::d, 3) -
                       cplx(1.5) * (pm(derivative(f, Der::d), ops.v1) -
                                    pm(derivative(f, Der::dbar), ops.v2)) +
                       cplx(3.0) * pm(f, w12);
            };
            auto b12 = [&](const QPF& f) {
                return cplx(-1.0) * pm(derivative(f, Der::dbar, 2), pq) -
                       cplx(1.5) * pm(f, product(pq, ops.v2)) -
                       pm(derivative(f, Der::dbar), cplx(3.0) * p_zb - q_zb) -
                       pm(f, cplx(3.0) * p_zbzb + q_zbzb);
            };
            auto b21 = [&](const QPF& f) {
                return cplx(-1.0) * pm(derivative(f, Der::d, 2), pq) -
                       cplx(1.5) * pm(f, product(pq, ops.v1)) -
                       pm(derivative(f, Der::d), cplx(3.0) * q_z - p_z) -
                       pm(f, cplx(3.0) * q_zz + p_zz);
            };
            QPF r1 = b11(x1) + b12(x2);
            QPF r2 = b21(x1) + cplx(-1.0) * b11(x2);
            return SpinorPair(std::move(r1), std::move(r2));
        }
    }
}

cplx triple_factor(int level, int sign) {
    if (level == 2) return sign > 0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
    return 1.0;
}

double triple_residual(int level, int sign, const PeriodicField& u, const PeriodicField& u_t,
                       const SpinorPair& test, cplx w_shift, cplx wp_shift) {
    Constraints con = solve_constraints(u, level);
    TripleOperators ops = make_triple_operators(u, con, level, sign, w_shift, wp_shift);
    const cplx c = triple_factor(level, sign);

    PeriodicField p_t = sign > 0 ? cplx(-1.0) * u_t : cplx(-1.0) * conj_field(u_t);
    PeriodicField q_t = sign > 0 ? conj_field(u_t) : u_t;

    SpinorPair Lchi = apply_L(ops, test);
    SpinorPair LAchi = apply_L(ops, apply_A(ops, test));
    SpinorPair ALchi = apply_A(ops, Lchi);
    SpinorPair BLchi = apply_B(ops, Lchi);
    QPF lt1 = cplx(-1.0) * product(test.c1, p_t);
    QPF lt2 = product(test.c2, q_t);

    QPF res1 = lt1 + c * LAchi.c1 + (-c) * ALchi.c1 + (-c) * BLchi.c1;
    QPF res2 = lt2 + c * LAchi.c2 + (-c) * ALchi.c2 + (-c) * BLchi.c2;

    double num = std::max(max_abs(res1.part), max_abs(res2.part));
    double den = 1e-30;
    for (const auto* s : {&LAchi, &ALchi, &BLchi})
        den = std::max({den, max_abs(s->c1.part), max_abs(s->c2.part)});
    den = std::max({den, max_abs(lt1.part), max_abs(lt2.part)});
    return num / den;
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

FlowState make_flow_state(WeierstrassData data, FlowLevel level) {
    require_weierstrass_consistent(data);
    FlowState s;
    s.con = solve_constraints(data.U, flow_order(level));
    s.data = std::move(data);
    return s;
}

namespace {

struct Deriv {
    PeriodicField du;
    std::array<PeriodicField, 4> ds; // psi1, psi2, phi1, phi2 parts
};

Deriv system_rhs(const PeriodicField& u, const WeierstrassData& ref,
                 const std::array<PeriodicField, 4>& parts, const FlowOptions& opt) {
    const int order = flow_order(opt.level);
    Constraints con = solve_constraints(u, order);
    Deriv d;
    d.du = flow_rhs(u, con, opt.level, opt.w_shift, opt.wp_shift);

    const int lvl = order;
    TripleOperators plus = make_triple_operators(u, con, lvl, +1, opt.w_shift, opt.wp_shift);
    TripleOperators minus = make_triple_operators(u, con, lvl, -1, opt.w_shift, opt.wp_shift);
    cplx fp = lvl == 2 ? cplx(0.0, 1.0) : cplx(1.0);
    cplx fm = lvl == 2 ? cplx(0.0, -1.0) : cplx(1.0);

    SpinorPair psi(QPF(ref.psi.lambda(), ref.psi.rho(), parts[0]),
                   QPF(ref.psi.lambda(), ref.psi.rho(), parts[1]));
    SpinorPair phi(QPF(ref.phi.lambda(), ref.phi.rho(), parts[2]),
                   QPF(ref.phi.lambda(), ref.phi.rho(), parts[3]));
    SpinorPair dpsi = apply_A(plus, psi);
    SpinorPair dphi = apply_A(minus, phi);
    d.ds[0] = (fp * dpsi.c1).part;
    d.ds[1] = (fp * dpsi.c2).part;
    d.ds[2] = (fm * dphi.c1).part;
    d.ds[3] = (fm * dphi.c2).part;
    return d;
}

} // namespace

FlowState flow_step(const FlowState& s, const FlowOptions& opt, StepInfo* info) {
    if (opt.dt <= 0.0) throw DomainError("dt must be positive");
    const PeriodicField& u0 = s.data.U;
    std::array<PeriodicField, 4> y0{s.data.psi.c1.part, s.data.psi.c2.part,
                                    s.data.phi.c1.part, s.data.phi.c2.part};

    auto advance = [&](const Deriv& d, double h) {
        PeriodicField u = u0;
        std::array<PeriodicField, 4> y = y0;
        for (size_t i = 0; i < u.v.size(); ++i) u.v[i] += h * d.du.v[i];
        for (int k = 0; k < 4; ++k)
            for (size_t i = 0; i < y[static_cast<size_t>(k)].v.size(); ++i)
                y[static_cast<size_t>(k)].v[i] += h * d.ds[static_cast<size_t>(k)].v[i];
        return std::pair<PeriodicField, std::array<PeriodicField, 4>>(std::move(u), std::move(y));
    };

    Deriv k1 = system_rhs(u0, s.data, y0, opt);
    auto [u1, y1] = advance(k1, 0.5 * opt.dt);
    Deriv k2 = system_rhs(u1, s.data, y1, opt);
    auto [u2, y2] = advance(k2, 0.5 * opt.dt);
    Deriv k3 = system_rhs(u2, s.data, y2, opt);
    auto [u3, y3] = advance(k3, opt.dt);
    Deriv k4 = system_rhs(u3, s.data, y3, opt);

    FlowState out = s;
    out.t = s.t + opt.dt;
    const double h6 = opt.dt / 6.0;
    PeriodicField u = u0;
    for (size_t i = 0; i < u.v.size(); ++i)
        u.v[i] += h6 * (k1.du.v[i] + 2.0 * k2.du.v[i] + 2.0 * k3.du.v[i] + k4.du.v[i]);
    std::array<PeriodicField, 4> y = y0;
    for (int k = 0; k < 4; ++k)
        for (size_t i = 0; i < y[static_cast<size_t>(k)].v.size(); ++i)
            y[static_cast<size_t>(k)].v[i] +=
                h6 * (k1.ds[static_cast<size_t>(k)].v[i] + 2.0 * k2.ds[static_cast<size_t>(k)].v[i] +
                      2.0 * k3.ds[static_cast<size_t>(k)].v[i] + k4.ds[static_cast<size_t>(k)].v[i]);

    // keep the state inside the dealias band: roundoff deposited on the
    // excluded modes would otherwise be amplified by the high derivative
    // symbols (up to |sym|^3 ~ 1e3 at the Nyquist corner)
    u = dealias(u);
    for (auto& f : y) f = dealias(f);

    double umax = max_abs(u);
    double ymax = 0.0;
    for (const auto& f : y) ymax = std::max(ymax, max_abs(f));
    if (!std::isfinite(umax) || !std::isfinite(ymax) || umax > opt.blowup_threshold ||
        ymax > opt.blowup_threshold)
        throw NumericalBlowup("state exceeded threshold at t = " + std::to_string(out.t));

    double diff = 0.0;
    for (size_t i = 0; i < u.v.size(); ++i) diff = std::max(diff, std::abs(u.v[i] - u0.v[i]));
    double rel = diff / (max_abs(u0) + 1e-300);
    if (info) {
        info->u_rel_change = rel;
        info->stiffness_warning = rel > opt.stiffness_fraction;
    }

    out.data.U = std::move(u);
    out.data.psi = SpinorPair(QPF(s.data.psi.lambda(), s.data.psi.rho(), std::move(y[0])),
                              QPF(s.data.psi.lambda(), s.data.psi.rho(), std::move(y[1])));
    out.data.phi = SpinorPair(QPF(s.data.phi.lambda(), s.data.phi.rho(), std::move(y[2])),
                              QPF(s.data.phi.lambda(), s.data.phi.rho(), std::move(y[3])));
    out.con = solve_constraints(out.data.U, flow_order(opt.level));
    return out;
}

InvariantRecord monitor(const FlowState& s) {
    InvariantRecord rec;
    rec.t = s.t;
    rec.willmore = willmore(s.data.U);
    ClosureReport rep = closure_report(s.data);
    rec.period_vectors = rep.period_vectors;
    rec.closure_integrals = rep.closure_integrals;
    rec.closedness = rep.closedness;
    rec.dirac_psi = dirac_residual(s.data.psi, s.data.U);
    rec.dirac_phi = dirac_vee_residual(s.data.phi, s.data.U);
    return rec;
}

// ---------------------------------------------------------------------------
// Gauge variation
// ---------------------------------------------------------------------------

GaugeVariationReport gauge_variation_check(const PeriodicField& u, cplx a, cplx c_shift,
                                           cplx cp_shift) {
    GaugeVariationReport rep;
    Constraints con = solve_constraints(u, 3);

    // u' = e^{a z - conj(a) zbar} u evolved with the constraints of u
    QPF uq(a, -std::conj(a), u);
    QPF ut_prime = flow_rhs_qpf(uq, con, FlowLevel::ds3);
    PeriodicField ut = flow_rhs(u, con, FlowLevel::ds3);

    PeriodicField uz = derivative(u, Der::d);
    PeriodicField uzz = derivative(u, Der::d, 2);
    PeriodicField uzb = derivative(u, Der::dbar);
    PeriodicField uzbzb = derivative(u, Der::dbar, 2);
    double dev = 0.0;
    for (size_t i = 0; i < u.v.size(); ++i) {
        cplx ub = std::conj(u.v[i]);
        double lhs = 2.0 * (ub * ut_prime.part.v[i]).real();
        double rhs = 2.0 * (ub * ut.v[i]).real();
        // conj(u)_z = conj(u_zbar), conj(u)_zz = conj(u_zbar zbar)
        cplx corr = a * a * (uz.v[i] * ub + u.v[i] * std::conj(uzb.v[i])) +
                    a * (uzz.v[i] * ub - u.v[i] * std::conj(uzbzb.v[i]));
        dev = std::max(dev, std::abs(lhs - rhs - 6.0 * corr.real()));
    }
    rep.max_deviation = dev;

    // Willmore rate with shifted w, w': W_t = 4 area d/dt mean|u|^2
    double k = 2.0 * (c_shift.real() + cp_shift.real());
    PeriodicField ut_shift = flow_rhs(u, con, FlowLevel::ds3, c_shift, cp_shift);
    cplx pair_mean = moments(product(conj_field(u), ut_shift)).mean;
    double wt = 4.0 * u.grid->area * 2.0 * pair_mean.real();
    double w0 = willmore(u);
    rep.willmore_rate_ratio = wt / (3.0 * k * w0);
    return rep;
}

} // namespace dst
