#pragma once

#include <cstdint>
#include <vector>

#include "pe/linalg.hpp"
#include "pe/rng.hpp"

namespace pe {

// Double-integrator wheeled robots on the plane. Pursuer and evader share
// the same drift nonlinearity; the pursuer additionally sees a matched
// disturbance.

struct PursuerState {
    Vec2 x;  // position [m]
    Vec2 v;  // velocity [m/s]
};

struct EvaderState {
    Vec2 x;
    Vec2 v;
};

struct ObstacleState {
    Vec2 x;               // current position [m]
    Vec2 dest;            // destination [m]
    double approach_gain = 0.05;  // k_o [1/s], velocity = -k_o (x - dest)
};

// d1 = dw1 + s1_amp*sin(s1_omega t) + c1_amp*cos(c1_omega t)
// d2 = dw2 + c2_amp*cos(c2_omega t)
// dw_i uniform in [-dw_bound, dw_bound], redrawn once per control step.
struct DisturbanceSpec {
    double dw_bound = 5.0;
    double s1_amp = 2.0;
    double s1_omega = 5.0 * 3.14159265358979323846;
    double c1_amp = 1.0;
    double c1_omega = 2.0 * 3.14159265358979323846;
    double c2_amp = 1.0;
    double c2_omega = 10.0 * 3.14159265358979323846;

    // Envelope implied by the bounds above; every sample satisfies
    // |d_i| <= axis bound.
    double bound_axis1() const { return dw_bound + std::abs(s1_amp) + std::abs(c1_amp); }
    double bound_axis2() const { return dw_bound + std::abs(c2_amp); }
};

struct EvaderControlConfig {
    double k1 = 2.0;      // position gain
    double k2 = 2.0;      // velocity gain
    double u_max = 10.0;  // per-component saturation
    bool cancel_drift = false;
};

// Piecewise-constant target schedule: (t_start, target) pairs, sorted by t.
struct WaypointSchedule {
    std::vector<double> t_start;
    std::vector<Vec2> target;

    Vec2 target_at(double t) const;
};

// Drift nonlinearity applied per axis to (position, velocity).
double nonlinearity_f(double mu1, double mu2);

// (f(x1,v1), f(x2,v2)) or zero in linear mode.
Vec2 drift_accel(const Vec2& x, const Vec2& v, bool nonlinear);

Vec4 pack(const PursuerState& z);
Vec4 pack(const EvaderState& z);
PursuerState unpack_pursuer(const Vec4& z);
EvaderState unpack_evader(const Vec4& z);

Vec4 pursuer_derivative(const PursuerState& z, const Vec2& u_p, const Vec2& d,
                        bool nonlinear = true);
Vec4 evader_derivative(const EvaderState& z, const Vec2& u_e, bool nonlinear = true);

Vec2 evader_tracking_controller(const EvaderState& z, const Vec2& target,
                                const EvaderControlConfig& cfg, bool nonlinear = true);

Vec2 obstacle_derivative(const ObstacleState& o);

Vec2 disturbance_sample(double t, const DisturbanceSpec& spec, Rng& rng);

// Relative drift F(z_p, z_e) = f_p(z_p) - f_e(z_e).
Vec4 relative_drift(const PursuerState& zp, const EvaderState& ze, bool nonlinear);

// Everything advanced by the fixed-step integrator. `sliding_acc`
// accumulates the sliding-surface integrand (drift + u_s + u_n) with the
// same quadrature as the velocity states, so the two stay consistent to
// rounding for piecewise-constant inputs.
struct StateBundle {
    Vec4 zp;
    Vec4 ze;
    Vec2 xo;
    Vec2 sliding_acc;
};

StateBundle operator+(const StateBundle& a, const StateBundle& b);
StateBundle operator*(double s, const StateBundle& a);
bool all_finite(const StateBundle& b);

struct StepInputs {
    Vec2 u_p;   // total pursuer input
    Vec2 u_sn;  // safeguard + nominal part (sliding integrand)
    Vec2 u_e;
    Vec2 d;
};

// One classical 4th-order Runge-Kutta step with zero-order-hold inputs.
// Returns false if the result contains NaN/Inf (integration fault).
bool integrate_step(StateBundle& state, const StepInputs& in, double dt,
                    double obstacle_gain, const Vec2& obstacle_dest, bool nonlinear);

}  // namespace pe
