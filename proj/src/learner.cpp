#include "pe/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace pe {

namespace {

// Velocity-channel slice of the feature gradient: columns of Phi hit by the
// input matrix. q = (Phi' w) restricted to the velocity rows.
Vec2 gradient_velocity_part(const Vec4& xi, const Vec10& w) {
    const Vec4 g = value_gradient(xi, w);
    return Vec2{g[2], g[3]};
}

// (Phi gp M gp' Phi') w without materializing the 10x10 matrix.
Vec10 channel_quadratic_times(const Vec4& xi, const Mat2& m, const Vec10& w) {
    const FeatureJacobian jac = feature_jacobian(xi);
    const Vec2 q = m * gradient_velocity_part(xi, w);
    Vec10 out;
    for (std::size_t k = 0; k < kFeatureDim; ++k) out[k] = jac(k, 2) * q[0] + jac(k, 3) * q[1];
    return out;
}

struct CostInverses {
    Mat2 r_inv;
    Mat2 t_inv;
};

CostInverses cost_inverses(const GameConfig& game) {
    CostInverses ci;
    invert(game.R, ci.r_inv);
    invert(game.T, ci.t_inv);
    return ci;
}

BellmanEval bellman_at(const Vec4& xi, const PursuerState& zp, const EvaderState& ze,
                       const LearnerState& st, const GameConfig& game, const CostInverses& ci,
                       bool nonlinear) {
    const Vec2 u_n = -0.5 * (ci.r_inv * gradient_velocity_part(xi, st.wa));
    const Vec2 u_e =
        (-0.5 / (game.gamma * game.gamma)) * (ci.t_inv * gradient_velocity_part(xi, st.wp));
    Vec4 flow = relative_drift(zp, ze, nonlinear);
    flow[2] += u_n[0] - u_e[0];
    flow[3] += u_n[1] - u_e[1];
    BellmanEval ev;
    ev.phi = feature_jacobian(xi) * flow;
    ev.rho = 1.0 + dot(ev.phi, ev.phi);
    ev.reward = reward(xi, u_n, u_e, game);
    ev.delta = dot(st.wc, ev.phi) + ev.reward;
    return ev;
}

SampleEval evaluate_point(const SamplePoint& pt, const LearnerState& st, const GameConfig& game,
                          const CostInverses& ci, bool nonlinear) {
    const BellmanEval be = bellman_at(pt.xi, unpack_pursuer(pt.zp), unpack_evader(pt.ze), st,
                                      game, ci, nonlinear);
    SampleEval ev;
    ev.phi = be.phi;
    ev.rho = be.rho;
    ev.reward = be.reward;
    ev.delta = be.delta;
    ev.g_wa = channel_quadratic_times(pt.xi, ci.r_inv, st.wa);
    ev.h_wp = channel_quadratic_times(pt.xi, ci.t_inv, st.wp);
    return ev;
}

}  // namespace

LearnerState learner_init(const LearnerConfig& cfg) {
    LearnerState st;
    st.wc = cfg.wc0;
    st.wa = cfg.wa0;
    st.wp = cfg.wp0;
    st.gamma = cfg.gamma0 * Mat10::identity();
    return st;
}

Vec2 actor_policy(const PursuerState&, const Vec4& xi, const Vec10& wa, const GameConfig& game) {
    Mat2 r_inv;
    invert(game.R, r_inv);
    return -0.5 * (r_inv * gradient_velocity_part(xi, wa));
}

Vec2 perturber_policy(const EvaderState&, const Vec4& xi, const Vec10& wp,
                      const GameConfig& game) {
    Mat2 t_inv;
    invert(game.T, t_inv);
    return (-0.5 / (game.gamma * game.gamma)) * (t_inv * gradient_velocity_part(xi, wp));
}

BellmanEval bellman_error(const Vec4& xi, const PursuerState& zp, const EvaderState& ze,
                          const LearnerState& st, const GameConfig& game, bool nonlinear) {
    return bellman_at(xi, zp, ze, st, game, cost_inverses(game), nonlinear);
}

SampleBatch sample_batch(const PursuerState& zp, const EvaderState& ze, int sample_count,
                         double box_halfwidth, Rng& rng) {
    if (sample_count < 1) throw std::invalid_argument("learner sample_count must be >= 1");
    SampleBatch batch;
    batch.points.resize(static_cast<std::size_t>(sample_count));
    const Vec4 zp0 = pack(zp);
    const Vec4 ze0 = pack(ze);
    for (auto& pt : batch.points) {
        for (std::size_t k = 0; k < 4; ++k) pt.zp[k] = zp0[k] + box_halfwidth * rng.next_symmetric();
        for (std::size_t k = 0; k < 4; ++k) pt.ze[k] = ze0[k] + box_halfwidth * rng.next_symmetric();
        pt.xi = pt.zp - pt.ze;
    }
    return batch;
}

void evaluate_batch_serial(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                           bool nonlinear) {
    const CostInverses ci = cost_inverses(game);
    batch.evals.resize(batch.points.size());
    for (std::size_t i = 0; i < batch.points.size(); ++i)
        batch.evals[i] = evaluate_point(batch.points[i], st, game, ci, nonlinear);
}

void evaluate_batch_parallel(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                             bool nonlinear) {
    const CostInverses ci = cost_inverses(game);
    batch.evals.resize(batch.points.size());
    const long n = static_cast<long>(batch.points.size());
    if (n < 64) {  // below thread-spawn overhead; same per-sample code
        for (long i = 0; i < n; ++i)
            batch.evals[static_cast<std::size_t>(i)] =
                evaluate_point(batch.points[static_cast<std::size_t>(i)], st, game, ci, nonlinear);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        batch.evals[static_cast<std::size_t>(i)] =
            evaluate_point(batch.points[static_cast<std::size_t>(i)], st, game, ci, nonlinear);
}

void evaluate_batch(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                    bool nonlinear, bool parallel) {
    if (parallel)
        evaluate_batch_parallel(batch, st, game, nonlinear);
    else
        evaluate_batch_serial(batch, st, game, nonlinear);
}

Mat10 normalized_outer(const SampleEval& ev) {
    return (1.0 / (ev.rho * ev.rho)) * outer(ev.phi, ev.phi);
}

bool critic_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch, double dt,
                   const LearnerConfig& cfg) {
    const double n = static_cast<double>(batch.size());

    Vec10 grad = (cfg.kc1 * rt.delta / (rt.rho * rt.rho)) * rt.phi;
    Mat10 m = (cfg.kc1 / (rt.rho * rt.rho)) * outer(rt.phi, rt.phi);
    for (const auto& ev : batch.evals) {  // fixed index order
        grad += (cfg.kc2 / n * ev.delta / (ev.rho * ev.rho)) * ev.phi;
        m += (cfg.kc2 / n / (ev.rho * ev.rho)) * outer(ev.phi, ev.phi);
    }

    st.wc -= dt * (st.gamma * grad);
    Mat10 dgamma = cfg.beta * st.gamma;
    dgamma += (-1.0) * (st.gamma * (m * st.gamma));
    st.gamma += dt * dgamma;
    clamp_spectrum(st.gamma, cfg.gamma_lo, cfg.gamma_hi);

    return all_finite(st.wc) && all_finite(st.gamma);
}

namespace {

void project_ball(Vec10& w, double radius) {
    const double n = norm(w);
    if (n > radius) w = (radius / n) * w;
}

}  // namespace

bool actor_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch, double dt,
                  const LearnerConfig& cfg, const GameConfig& game, const Vec4& xi,
                  const PursuerState&) {
    const CostInverses ci = cost_inverses(game);
    const double n = static_cast<double>(batch.size());

    Vec10 dwa = -cfg.ka1 * (st.wa - st.wc) - cfg.ka2 * st.wa;
    const double c_rt = dot(rt.phi, st.wc) / (rt.rho * rt.rho);
    dwa += (cfg.kc1 / 4.0 * c_rt) * channel_quadratic_times(xi, ci.r_inv, st.wa);
    for (const auto& ev : batch.evals) {
        const double c = dot(ev.phi, st.wc) / (ev.rho * ev.rho);
        dwa += (cfg.kc2 / (4.0 * n) * c) * ev.g_wa;
    }
    st.wa += dt * dwa;
    project_ball(st.wa, cfg.w_bar);
    return all_finite(st.wa);
}

bool perturber_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch,
                      double dt, const LearnerConfig& cfg, const GameConfig& game, const Vec4& xi,
                      const EvaderState&) {
    const CostInverses ci = cost_inverses(game);
    const double n = static_cast<double>(batch.size());
    const double g2 = game.gamma * game.gamma;

    Vec10 dwp = -cfg.kp1 * (st.wp - st.wc) - cfg.kp2 * st.wp;
    const double c_rt = dot(rt.phi, st.wc) / (rt.rho * rt.rho);
    dwp -= (cfg.kc1 / (4.0 * g2) * c_rt) * channel_quadratic_times(xi, ci.t_inv, st.wp);
    for (const auto& ev : batch.evals) {
        const double c = dot(ev.phi, st.wc) / (ev.rho * ev.rho);
        dwp -= (cfg.kc2 / (4.0 * n * g2) * c) * ev.h_wp;
    }
    st.wp += dt * dwp;
    project_ball(st.wp, cfg.w_bar);
    return all_finite(st.wp);
}

ExcitationReport excitation_monitor(const SampleBatch& batch, double lambda_c) {
    ExcitationReport rep;
    if (batch.evals.empty()) return rep;
    Mat10 m;
    for (const auto& ev : batch.evals) m += normalized_outer(ev);
    m = (1.0 / static_cast<double>(batch.size())) * m;
    rep.min_eig = min_eigenvalue_sym(m);
    rep.passes = rep.min_eig >= lambda_c;
    return rep;
}

}  // namespace pe
