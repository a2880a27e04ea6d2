#pragma once

#include "pe/dynamics.hpp"
#include "pe/linalg.hpp"

namespace pe {

// Safety layer: a position barrier of relative degree two against a moving
// obstacle of unknown velocity, a velocity barrier of relative degree one,
// and an inverse-barrier safeguard control that repels the pursuer from the
// boundary of the safe set. A closed-form KKT solver over the same two
// constraints is kept as a testing oracle; it needs the true disturbance
// and obstacle velocity, which the runtime safeguard does not.

struct SafeguardConfig {
    double k_p = 0.1;    // position barrier scale
    double r_o = 5.0;    // minimum safety distance [m]
    double v_min = -20.0;  // minimum X-axis velocity [m/s]
    double p1 = 50.0;    // barrier chain slope [1/s]
    double p2 = 50.0;    // constraint slope, KKT oracle path only [1/s]
    double k = 1.0;      // robust margin tradeoff (> 0)
    double eta = 2.5;    // obstacle speed bound [m/s]
    double Kx = 1000.0;  // position safeguard gain
    double Kv = 10.0;    // velocity safeguard gain
    // Published closed form of the robust margin (coefficients k_p/4k and
    // k*k_p*eta^2) instead of the one obtained by instantiating the general
    // definition (k_p^2/k and k*eta^2). Default keeps the general form.
    bool paper_sim_variant = false;
    bool nonlinear_drift = true;
};

struct BarrierEval {
    double b_x = 0;        // position barrier
    double b_v = 0;        // velocity barrier
    double tilde_b_x = 0;  // robust lower bound on db_x/dt
    double phi_x0 = 0;     // == b_x
    double phi_x1 = 0;     // tilde_b_x + p1 * phi_x0
    Vec2 beta1;            // position constraint row, 2 (x_p - x_o)^T
    Vec2 beta2;            // velocity constraint row, (1, 0)
    double grad_Bx = 0;    // d(1/phi_x1)/d phi_x1 = -1/phi_x1^2
    double grad_Bv = 0;
    double zeta_x = 0;     // -Kx * grad_Bx
    double zeta_v = 0;
    Vec2 u_s;
    bool breach = false;   // phi_x1 <= 0 or b_v <= 0
};

double barrier_position(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg);
double barrier_velocity(const PursuerState& zp, const SafeguardConfig& cfg);
double robust_lower_derivative(const PursuerState& zp, const Vec2& x_o,
                               const SafeguardConfig& cfg);

struct PhiChain {
    double phi_x0;
    double phi_x1;
};
PhiChain phi_chain(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg);

// Closed-form constraint rows of the planar scenario.
void constraint_rows(const PursuerState& zp, const Vec2& x_o, Vec2& beta1, Vec2& beta2);

// Generic rows: Lie derivatives of phi_x1 and b_v along the input channels.
Vec2 lie_row_position(const PursuerState& zp, const Vec2& x_o, const SafeguardConfig& cfg);
Vec2 lie_row_velocity();

// Energy-form safeguard. Inside the safe interior the inverse-barrier
// gains decay with the squared margins; past a breach the margins are
// clamped at +1e-6 so the diagnostic output stays finite, and `breach`
// is set.
BarrierEval safeguard_policy(const PursuerState& zp, const Vec2& x_o,
                             const SafeguardConfig& cfg);

struct KktOracleInput {
    Vec2 d;                  // true disturbance
    Vec2 obstacle_velocity;  // true obstacle velocity (acceleration taken as 0)
    Vec2 u_nominal;          // u_r + u_n acting alongside the safeguard
};

enum class KktActiveSet { none, position, velocity, both, infeasible };

struct KktSolution {
    Vec2 u_s;
    double lambda_x = 0;
    double lambda_v = 0;
    KktActiveSet active = KktActiveSet::none;
    double slack_x = 0;  // constraint value at the solution
    double slack_v = 0;
};

// Minimum-norm correction subject to the two affine constraints, solved by
// explicit active-set enumeration. Testing/oracle use only.
KktSolution kkt_safeguard_oracle(const PursuerState& zp, const Vec2& x_o,
                                 const KktOracleInput& in, const SafeguardConfig& cfg);

struct GramCondition {
    bool is_pd = false;
    double min_eig = 0;
    double sin2_term = 0;  // |b1|^2 |b2|^2 sin^2(angle) == det of the Gram matrix
};

GramCondition gram_condition(const Vec2& beta1, const Vec2& beta2);

}  // namespace pe
