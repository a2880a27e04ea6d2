#include "pe/safeguard.hpp"

#include <cmath>

namespace pe {

namespace {

constexpr double kBarrierFloor = 1e-6;  // clamp for post-breach diagnostics

// Quadratic coefficient and constant offset of the robust margin.
double margin_quadratic(const SafeguardConfig& cfg) {
    return cfg.paper_sim_variant ? cfg.k_p / (4.0 * cfg.k) : cfg.k_p * cfg.k_p / cfg.k;
}

double margin_offset(const SafeguardConfig& cfg) {
    return cfg.paper_sim_variant ? cfg.k * cfg.k_p * cfg.eta * cfg.eta
                                 : cfg.k * cfg.eta * cfg.eta;
}

}  // namespace

double barrier_position(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg) {
    const Vec2 e = zp.x - x_o;
    return cfg.k_p * (dot(e, e) - cfg.r_o * cfg.r_o);
}

double barrier_velocity(const PursuerState& zp, const SafeguardConfig& cfg) {
    return zp.v[0] - cfg.v_min;
}

double robust_lower_derivative(const PursuerState& zp, const Vec2& x_o,
                               const SafeguardConfig& cfg) {
    const Vec2 e = zp.x - x_o;
    return 2.0 * cfg.k_p * dot(e, zp.v) - margin_quadratic(cfg) * dot(e, e) - margin_offset(cfg);
}

PhiChain phi_chain(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg) {
    const double b = barrier_position(zp, x_o, cfg);
    return PhiChain{b, robust_lower_derivative(zp, x_o, cfg) + cfg.p1 * b};
}

void constraint_rows(const PursuerState& zp, const Vec2& x_o, Vec2& beta1, Vec2& beta2) {
    beta1 = 2.0 * (zp.x - x_o);
    beta2 = Vec2{1.0, 0.0};
}

Vec2 lie_row_position(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg) {
    return 2.0 * cfg.k_p * (zp.x - x_o);
}

Vec2 lie_row_velocity() { return Vec2{1.0, 0.0}; }

BarrierEval safeguard_policy(const PursuerState& zp, const Vec2& x_o,
                             const SafeguardConfig& cfg) {
    BarrierEval ev;
    ev.b_x = barrier_position(zp, x_o, cfg);
    ev.b_v = barrier_velocity(zp, cfg);
    ev.tilde_b_x = robust_lower_derivative(zp, x_o, cfg);
    ev.phi_x0 = ev.b_x;
    ev.phi_x1 = ev.tilde_b_x + cfg.p1 * ev.phi_x0;
    constraint_rows(zp, x_o, ev.beta1, ev.beta2);

    ev.breach = !(ev.phi_x1 > 0.0 && ev.b_v > 0.0);
    const double phi = std::max(ev.phi_x1, kBarrierFloor);
    const double bv = std::max(ev.b_v, kBarrierFloor);
    ev.grad_Bx = -1.0 / (phi * phi);
    ev.grad_Bv = -1.0 / (bv * bv);
    ev.zeta_x = -cfg.Kx * ev.grad_Bx;
    ev.zeta_v = -cfg.Kv * ev.grad_Bv;

    // Position row vanishes only with the pursuer at the obstacle center,
    // unreachable while safe; drop that term rather than divide 0 by 0.
    const Vec2 pos_row = (dot(ev.beta1, ev.beta1) > 0.0) ? ev.beta1 : Vec2{0.0, 0.0};
    ev.u_s = ev.zeta_x * pos_row + ev.zeta_v * ev.beta2;
    return ev;
}

KktSolution kkt_safeguard_oracle(const PursuerState& zp, const Vec2& x_o,
                                 const KktOracleInput& in, const SafeguardConfig& cfg) {
    const Vec2 e = zp.x - x_o;
    const double cq = cfg.paper_sim_variant ? cfg.k_p / (4.0 * cfg.k) : cfg.k_p * cfg.k_p / cfg.k;
    const PhiChain chain = phi_chain(zp, x_o, cfg);

    // Gradients of phi_x1 w.r.t. pursuer position, velocity, and obstacle.
    const Vec2 dphi_dx = 2.0 * cfg.k_p * zp.v + (2.0 * (cfg.p1 * cfg.k_p - cq)) * e;
    const Vec2 dphi_dv = 2.0 * cfg.k_p * e;
    const Vec2 dphi_do = -1.0 * dphi_dx;

    const Vec2 f = drift_accel(zp.x, zp.v, cfg.nonlinear_drift);
    const double lf_phi = dot(dphi_dx, zp.v) + dot(dphi_dv, f);
    const double alpha1 = lf_phi + dot(dphi_do, in.obstacle_velocity) + cfg.p2 * chain.phi_x1;
    const Vec2 beta1 = dphi_dv;  // input channel acts on velocity states

    const double bv = barrier_velocity(zp, cfg);
    const double alpha2 = f[0] + cfg.p2 * bv;
    const Vec2 beta2{1.0, 0.0};

    const Vec2 ud = in.u_nominal + in.d;
    const double Lx = alpha1 + dot(beta1, ud);
    const double Lv = alpha2 + dot(beta2, ud);

    KktSolution sol;
    const double tol = 1e-12;

    auto finish = [&](const Vec2& mu, double lx, double lv, KktActiveSet tag) {
        sol.u_s = mu;
        sol.lambda_x = lx;
        sol.lambda_v = lv;
        sol.active = tag;
        sol.slack_x = Lx + dot(beta1, mu);
        sol.slack_v = Lv + dot(beta2, mu);
    };

    // Case 1: both constraints already satisfied.
    if (Lx >= -tol && Lv >= -tol) {
        finish(Vec2{0.0, 0.0}, 0.0, 0.0, KktActiveSet::none);
        return sol;
    }

    // Case 2: position constraint active alone.
    const double b11 = dot(beta1, beta1);
    if (b11 > 0.0) {
        const double lx = -Lx / b11;
        if (lx >= -tol && Lv + lx * dot(beta2, beta1) >= -tol) {
            finish(lx * beta1, std::max(lx, 0.0), 0.0, KktActiveSet::position);
            return sol;
        }
    }

    // Case 3: velocity constraint active alone.
    const double b22 = dot(beta2, beta2);
    {
        const double lv = -Lv / b22;
        if (lv >= -tol && Lx + lv * dot(beta1, beta2) >= -tol) {
            finish(lv * beta2, 0.0, std::max(lv, 0.0), KktActiveSet::velocity);
            return sol;
        }
    }

    // Case 4: both active; multipliers from the 2x2 Gram system.
    const double b12 = dot(beta1, beta2);
    const double det = b11 * b22 - b12 * b12;
    if (std::abs(det) > 1e-12 * std::max(1.0, b11 * b22)) {
        const double lx = (-Lx * b22 + Lv * b12) / det;
        const double lv = (-Lv * b11 + Lx * b12) / det;
        if (lx >= -tol && lv >= -tol) {
            finish(lx * beta1 + lv * beta2, std::max(lx, 0.0), std::max(lv, 0.0),
                   KktActiveSet::both);
            return sol;
        }
    }

    sol.active = KktActiveSet::infeasible;
    sol.slack_x = Lx;
    sol.slack_v = Lv;
    return sol;
}

GramCondition gram_condition(const Vec2& beta1, const Vec2& beta2) {
    const double g11 = dot(beta1, beta1);
    const double g12 = dot(beta1, beta2);
    const double g22 = dot(beta2, beta2);
    GramCondition c;
    c.sin2_term = g11 * g22 - g12 * g12;  // det == |b1|^2 |b2|^2 sin^2
    // leading minors with a scale-relative floor so exactly-parallel rows are
    // not reported definite off rounding noise in the determinant
    c.is_pd = g11 > 0.0 && c.sin2_term > 1e-12 * g11 * g22;
    const double tr = g11 + g22;
    const double disc = std::max(tr * tr - 4.0 * c.sin2_term, 0.0);
    c.min_eig = 0.5 * (tr - std::sqrt(disc));
    return c;
}

}  // namespace pe
