#include "pe/game.hpp"

#include <cmath>
#include <limits>

#include "pe/riccati.hpp"

namespace pe {

double reward(const Vec4& xi, const Vec2& u_n, const Vec2& u_e, const GameConfig& cfg) {
    return quad_form(cfg.Q, xi) + quad_form(cfg.R, u_n) -
           cfg.gamma * cfg.gamma * quad_form(cfg.T, u_e);
}

ResidualStats hji_residual(const Vec10& w, const std::vector<StatePair>& states,
                           const GameConfig& cfg, bool nonlinear) {
    Mat2 r_inv, t_inv;
    invert(cfg.R, r_inv);
    invert(cfg.T, t_inv);

    ResidualStats st;
    if (states.empty()) return st;
    double sum = 0.0;
    for (const auto& sp : states) {
        const Vec4 xi = pack(sp.zp) - pack(sp.ze);
        const Vec4 grad = value_gradient(xi, w);
        const Vec2 gv{grad[2], grad[3]};  // input channels act on velocities
        const Vec4 f = relative_drift(sp.zp, sp.ze, nonlinear);
        const double res = dot(grad, f) - 0.25 * dot(gv, r_inv * gv) + quad_form(cfg.Q, xi) +
                           0.25 / (cfg.gamma * cfg.gamma) * dot(gv, t_inv * gv);
        const double a = std::abs(res);
        sum += a;
        st.max_abs = std::max(st.max_abs, a);
    }
    st.mean_abs = sum / static_cast<double>(states.size());
    return st;
}

void L2Accounting::add_sample(double dt, double lhs_integrand, double rhs_integrand) {
    if (has_prev) {
        lhs += 0.5 * dt * (prev_lhs_integrand + lhs_integrand);
        rhs += 0.5 * dt * (prev_rhs_integrand + rhs_integrand);
    }
    prev_lhs_integrand = lhs_integrand;
    prev_rhs_integrand = rhs_integrand;
    has_prev = true;
}

double L2Accounting::ratio() const {
    if (rhs == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return lhs / rhs;
}

GareSolution gare_solve(const Mat4& A, const Mat<4, 2>& Bp, const Mat<4, 2>& Be,
                        const GameConfig& cfg, int max_iter, double tol) {
    const RiccatiResult<4> r =
        riccati_game_solve<4, 2, 2>(A, Bp, Be, cfg.Q, cfg.R, cfg.T, cfg.gamma, max_iter, tol);
    GareSolution out;
    out.P = r.P;
    out.residual = r.residual;
    out.iterations = r.iterations;
    out.ok = r.ok;
    out.error = r.error;
    out.residual_history = r.residual_history;
    return out;
}

Mat4 double_integrator_A() {
    Mat4 a;
    a(0, 2) = 1.0;
    a(1, 3) = 1.0;
    return a;
}

Mat<4, 2> velocity_channel_B() {
    Mat<4, 2> b;
    b(2, 0) = 1.0;
    b(3, 1) = 1.0;
    return b;
}

Vec2 pursuit_policy_from_p(const Mat4& P, const Vec4& xi, const GameConfig& cfg) {
    Mat2 r_inv;
    invert(cfg.R, r_inv);
    const Vec4 px = P * xi;
    return -1.0 * (r_inv * Vec2{px[2], px[3]});
}

Vec2 evasion_policy_from_p(const Mat4& P, const Vec4& xi, const GameConfig& cfg) {
    Mat2 t_inv;
    invert(cfg.T, t_inv);
    const Vec4 px = P * xi;
    return (-1.0 / (cfg.gamma * cfg.gamma)) * (t_inv * Vec2{px[2], px[3]});
}

}  // namespace pe
