#include "pe/smc.hpp"

#include <algorithm>
#include <cmath>

namespace pe {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

SmcState smc_init(const PursuerState& zp0, const SmcConfig& cfg) {
    SmcState st;
    st.S0 = zp0.v;
    st.mode = SmcMode::boundary;  // s(0) = 0 by construction
    st.t_star = 0.0;
    st.K_at_tstar = cfg.K0;
    st.K = cfg.K3;
    return st;
}

Vec2 sliding_variable(const PursuerState& zp, const SmcState& st) {
    return zp.v - st.S0 - st.integral_acc;
}

Vec2 robust_control(const Vec2& s, double K, double rho) {
    return Vec2{-K * std::tanh(s[0] / rho), -K * std::tanh(s[1] / rho)};
}

void gain_update(SmcState& st, const Vec2& s, double t, double dt, const SmcConfig& cfg) {
    st.s = s;
    const double ns = norm(s);
    if (ns > cfg.eps) {
        st.mode = SmcMode::reaching;
        st.K += dt * (cfg.K1 + cfg.K2 * ns);
        if (st.K >= cfg.K_cap) {
            st.K = cfg.K_cap;
            st.cap_hit = true;
        }
    } else {
        if (st.mode == SmcMode::reaching) {
            st.mode = SmcMode::boundary;
            st.t_star = t;
            st.K_at_tstar = st.K;
            st.theta = Vec2{0.0, 0.0};
        }
        const double decay = std::exp(-dt / cfg.K4);
        for (int i = 0; i < 2; ++i) {
            const double target = sgn(s[i]);
            st.theta[i] = target + (st.theta[i] - target) * decay;
        }
        st.K = cfg.K3 + st.K_at_tstar * norm(st.theta);
    }
}

ReachingReport reaching_monitor(const std::vector<double>& times,
                                const std::vector<double>& s_norms, double eps) {
    ReachingReport rep;
    std::size_t hit_idx = 0;
    for (std::size_t i = 0; i < s_norms.size(); ++i) {
        if (s_norms[i] <= eps) {
            rep.hit = true;
            rep.hit_time = times[i];
            hit_idx = i;
            break;
        }
    }
    if (!rep.hit) return rep;
    std::size_t inside = 0, total = 0;
    for (std::size_t i = hit_idx; i < s_norms.size(); ++i) {
        ++total;
        if (s_norms[i] <= eps) ++inside;
        rep.max_excursion_after = std::max(rep.max_excursion_after, s_norms[i]);
    }
    rep.residence_fraction = total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
    return rep;
}

}  // namespace pe
