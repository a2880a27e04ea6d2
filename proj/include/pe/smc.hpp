#pragma once

#include <cstddef>
#include <vector>

#include "pe/dynamics.hpp"
#include "pe/linalg.hpp"

namespace pe {

// Integral sliding surface with an adaptive-gain tanh reaching law.
// S(z_p) = v_p (the pseudo-inverse of the input matrix selects the velocity
// block), so s = v_p(t) - v_p(0) - integral of (drift + u_s + u_n); its flow
// reduces to ds/dt = u_r + d. The safeguard is designed without reading any
// of this state; only the integrand here sees u_s.

enum class SmcMode { reaching, boundary };

struct SmcConfig {
    double K1 = 1.0;
    double K2 = 10.0;
    double K3 = 10.0;
    double K4 = 10.0;   // sign filter time constant [s]
    double rho = 0.1;   // tanh boundary layer width
    double eps = 0.01;  // mode-switch band on |s|
    double K0 = 10.0;   // initial gain
    double K_cap = 1e4; // adaptation ceiling; hitting it flags the run
};

struct SmcState {
    Vec2 integral_acc;      // advanced by the integrator alongside the states
    Vec2 s;                 // latest sliding variable
    double K = 0.0;
    Vec2 theta;             // filtered sign(s), boundary mode
    double K_at_tstar = 0.0;
    double t_star = 0.0;    // last entry time into the eps-band
    SmcMode mode = SmcMode::boundary;
    Vec2 S0;                // v_p at t = 0
    bool cap_hit = false;
};

SmcState smc_init(const PursuerState& zp0, const SmcConfig& cfg);

Vec2 sliding_variable(const PursuerState& zp, const SmcState& st);

// u_r = -K tanh(s_i / rho) componentwise; |u_r|_inf <= K.
Vec2 robust_control(const Vec2& s, double K, double rho);

// Advances the adaptive gain over one control period ending at time t.
// Outside the band K integrates K1 + K2|s|; inside, K = K3 + K(t*)|theta|
// with theta following an exactly discretized first-order sign filter.
void gain_update(SmcState& st, const Vec2& s, double t, double dt, const SmcConfig& cfg);

struct ReachingReport {
    bool hit = false;
    double hit_time = 0.0;            // first time with |s| <= eps
    double residence_fraction = 0.0;  // fraction of post-hit samples inside the band
    double max_excursion_after = 0.0; // max |s| after the hit
};

ReachingReport reaching_monitor(const std::vector<double>& times,
                                const std::vector<double>& s_norms, double eps);

}  // namespace pe
