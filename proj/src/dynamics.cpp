#include "pe/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pe {

Vec2 WaypointSchedule::target_at(double t) const {
    Vec2 tgt = target.empty() ? Vec2{0.0, 0.0} : target.front();
    for (std::size_t i = 0; i < t_start.size(); ++i) {
        if (t_start[i] <= t) tgt = target[i];
    }
    return tgt;
}

double nonlinearity_f(double mu1, double mu2) {
    return 0.1 * std::cos(0.08 * mu1) * std::sin(0.03 * mu2) -
           0.1 * std::cos(0.03 * mu1) * std::tanh(0.08 * mu2) + 0.05 * mu2;
}

Vec2 drift_accel(const Vec2& x, const Vec2& v, bool nonlinear) {
    if (!nonlinear) return Vec2{0.0, 0.0};
    return Vec2{nonlinearity_f(x[0], v[0]), nonlinearity_f(x[1], v[1])};
}

Vec4 pack(const PursuerState& z) { return Vec4{z.x[0], z.x[1], z.v[0], z.v[1]}; }
Vec4 pack(const EvaderState& z) { return Vec4{z.x[0], z.x[1], z.v[0], z.v[1]}; }

PursuerState unpack_pursuer(const Vec4& z) {
    return PursuerState{Vec2{z[0], z[1]}, Vec2{z[2], z[3]}};
}

EvaderState unpack_evader(const Vec4& z) {
    return EvaderState{Vec2{z[0], z[1]}, Vec2{z[2], z[3]}};
}

Vec4 pursuer_derivative(const PursuerState& z, const Vec2& u_p, const Vec2& d,
                        bool nonlinear) {
    const Vec2 f = drift_accel(z.x, z.v, nonlinear);
    return Vec4{z.v[0], z.v[1], f[0] + u_p[0] + d[0], f[1] + u_p[1] + d[1]};
}

Vec4 evader_derivative(const EvaderState& z, const Vec2& u_e, bool nonlinear) {
    const Vec2 f = drift_accel(z.x, z.v, nonlinear);
    return Vec4{z.v[0], z.v[1], f[0] + u_e[0], f[1] + u_e[1]};
}

Vec2 evader_tracking_controller(const EvaderState& z, const Vec2& target,
                                const EvaderControlConfig& cfg, bool nonlinear) {
    Vec2 u = -1.0 * (cfg.k1 * (z.x - target) + cfg.k2 * z.v);
    if (cfg.cancel_drift) u -= drift_accel(z.x, z.v, nonlinear);
    for (int i = 0; i < 2; ++i) u[i] = std::clamp(u[i], -cfg.u_max, cfg.u_max);
    return u;
}

Vec2 obstacle_derivative(const ObstacleState& o) {
    return -o.approach_gain * (o.x - o.dest);
}

Vec2 disturbance_sample(double t, const DisturbanceSpec& spec, Rng& rng) {
    const double dw1 = spec.dw_bound * rng.next_symmetric();
    const double dw2 = spec.dw_bound * rng.next_symmetric();
    return Vec2{
        dw1 + spec.s1_amp * std::sin(spec.s1_omega * t) + spec.c1_amp * std::cos(spec.c1_omega * t),
        dw2 + spec.c2_amp * std::cos(spec.c2_omega * t)};
}

Vec4 relative_drift(const PursuerState& zp, const EvaderState& ze, bool nonlinear) {
    const Vec2 fp = drift_accel(zp.x, zp.v, nonlinear);
    const Vec2 fe = drift_accel(ze.x, ze.v, nonlinear);
    return Vec4{zp.v[0] - ze.v[0], zp.v[1] - ze.v[1], fp[0] - fe[0], fp[1] - fe[1]};
}

StateBundle operator+(const StateBundle& a, const StateBundle& b) {
    return StateBundle{a.zp + b.zp, a.ze + b.ze, a.xo + b.xo, a.sliding_acc + b.sliding_acc};
}

StateBundle operator*(double s, const StateBundle& a) {
    return StateBundle{s * a.zp, s * a.ze, s * a.xo, s * a.sliding_acc};
}

bool all_finite(const StateBundle& b) {
    return all_finite(b.zp) && all_finite(b.ze) && all_finite(b.xo) && all_finite(b.sliding_acc);
}

namespace {

StateBundle derivative(const StateBundle& s, const StepInputs& in, double obstacle_gain,
                       const Vec2& obstacle_dest, bool nonlinear) {
    const PursuerState p = unpack_pursuer(s.zp);
    const EvaderState e = unpack_evader(s.ze);
    const Vec2 fp = drift_accel(p.x, p.v, nonlinear);
    StateBundle d;
    d.zp = Vec4{p.v[0], p.v[1], fp[0] + in.u_p[0] + in.d[0], fp[1] + in.u_p[1] + in.d[1]};
    d.ze = evader_derivative(e, in.u_e, nonlinear);
    d.xo = -obstacle_gain * (s.xo - obstacle_dest);
    d.sliding_acc = fp + in.u_sn;
    return d;
}

}  // namespace

bool integrate_step(StateBundle& state, const StepInputs& in, double dt,
                    double obstacle_gain, const Vec2& obstacle_dest, bool nonlinear) {
    const StateBundle k1 = derivative(state, in, obstacle_gain, obstacle_dest, nonlinear);
    const StateBundle k2 =
        derivative(state + 0.5 * dt * k1, in, obstacle_gain, obstacle_dest, nonlinear);
    const StateBundle k3 =
        derivative(state + 0.5 * dt * k2, in, obstacle_gain, obstacle_dest, nonlinear);
    const StateBundle k4 = derivative(state + dt * k3, in, obstacle_gain, obstacle_dest, nonlinear);
    state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return all_finite(state);
}

}  // namespace pe
