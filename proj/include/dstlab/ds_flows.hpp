#pragma once

// The DSII hierarchy at n = 1, 2, 3 under the reduction p = -u, q = conj(u):
// constraint solvers, flow right-hand sides, the A_n / B_n operators of the
// Manakov L-A-B triple, a triple-identity residual oracle, coupled RK4
// stepping of (u, psi, phi), invariant monitoring, and the gauge-variation
// identity for potentials u' = e^{a z - conj(a) zbar} u.

#include "dstlab/dirac.hpp"
#include "dstlab/weierstrass.hpp"

#include <optional>

namespace dst {

enum class FlowLevel { ds1, ds2, ds3, mnv };
int flow_order(FlowLevel level); // 1, 2, 3, 3

struct Constraints {
    PeriodicField v;  // dbar v = (|u|^2)_z, zero mean
    PeriodicField w;  // w  = d dbar^{-1} (conj(u) u_z)
    PeriodicField wp; // w' = dbar d^{-1} (conj(u) u_zbar)
};

// level 2 fills v only; level 3 (and mnv) also w, w'.
Constraints solve_constraints(const PeriodicField& u, int order);

// DS flow right-hand side for u. Optional constant shifts are added to w and
// w' (they break Willmore conservation at the documented rate).
PeriodicField flow_rhs(const PeriodicField& u, const Constraints& con, FlowLevel level,
                       cplx w_shift = 0.0, cplx wp_shift = 0.0);
QPF flow_rhs_qpf(const QPF& u, const Constraints& con, FlowLevel level,
                 cplx w_shift = 0.0, cplx wp_shift = 0.0);

// Coefficient fields of A_n / B_n for one sign of the reduction:
//   sign +1: p = -u, q = conj(u);  sign -1: p = -conj(u), q = u.
struct TripleOperators {
    int level = 2; // 1, 2, or 3
    int sign = +1;
    PeriodicField p, q, v1, v2, w1, w2;
};

TripleOperators make_triple_operators(const PeriodicField& u, const Constraints& con,
                                      int level, int sign, cplx w_shift = 0.0,
                                      cplx wp_shift = 0.0);

SpinorPair apply_A(const TripleOperators& ops, const SpinorPair& chi);
SpinorPair apply_B(const TripleOperators& ops, const SpinorPair& chi);
SpinorPair apply_L(const TripleOperators& ops, const SpinorPair& chi);

// Scalar factor applied to (A_n, B_n) in the triple for this level and sign:
// i / -i at n = 2, 1 otherwise.
cplx triple_factor(int level, int sign);

// Norm of (L_t + [L, cA] - cB L) chi relative to the sizes of the summands;
// u_t normally comes from flow_rhs. This is the numerical certificate of the
// triple identity and of the constraint choices.
double triple_residual(int level, int sign, const PeriodicField& u, const PeriodicField& u_t,
                       const SpinorPair& test, cplx w_shift = 0.0, cplx wp_shift = 0.0);

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct FlowState {
    double t = 0.0;
    WeierstrassData data; // data.U is the evolving potential u
    Constraints con;      // consistent with data.U
};

FlowState make_flow_state(WeierstrassData data, FlowLevel level);

struct FlowOptions {
    FlowLevel level = FlowLevel::ds2;
    double dt = 1e-3;
    cplx w_shift = 0.0, wp_shift = 0.0;
    double blowup_threshold = 1e8;
    double stiffness_fraction = 0.10; // warn when u moves more than this per step
};

struct StepInfo {
    double u_rel_change = 0.0;
    bool stiffness_warning = false;
};

// Classical RK4 on the coupled system (u, psi1, psi2, phi1, phi2); constraints
// are recomputed at every stage; prefactor exponents stay frozen.
FlowState flow_step(const FlowState& s, const FlowOptions& opt, StepInfo* info = nullptr);

struct InvariantRecord {
    double t = 0.0;
    double willmore = 0.0;
    std::array<std::array<double, 2>, 4> period_vectors{};
    std::array<cplx, 4> closure_integrals{};
    double dirac_psi = 0.0, dirac_phi = 0.0;
    double closedness = 0.0;
};

InvariantRecord monitor(const FlowState& s);

// ---------------------------------------------------------------------------
// Gauge variation of the DS3 flow
// ---------------------------------------------------------------------------

struct GaugeVariationReport {
    // max over nodes of | d|u'|^2/dt - d|u|^2/dt - closed-form correction |
    double max_deviation = 0.0;
    // analytic W_t / (3 k W) for w -> w + c, w' -> w' + c', k = c+c'+cc+cc'
    double willmore_rate_ratio = 0.0;
};

GaugeVariationReport gauge_variation_check(const PeriodicField& u, cplx a,
                                           cplx c_shift = 0.25, cplx cp_shift = 0.25);

} // namespace dst
