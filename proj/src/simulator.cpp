#include "pe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace pe {

namespace {

bool uses_safeguard(ControllerMode m) {
    return m == ControllerMode::safe_robust_rl || m == ControllerMode::safeguard_only;
}

bool uses_smc(ControllerMode m) {
    return m == ControllerMode::safe_robust_rl || m == ControllerMode::robust_rl;
}

bool uses_learning(ControllerMode m) { return m != ControllerMode::safeguard_only; }

// Uniform draw from the disc of the given radius; two stream draws.
Vec2 random_in_disc(Rng& rng, double radius) {
    const double ang = 2.0 * 3.14159265358979323846 * rng.next_unit();
    const double r = radius * std::sqrt(rng.next_unit());
    return Vec2{r * std::cos(ang), r * std::sin(ang)};
}

// Tracks contiguous sub-zero spans of a barrier signal.
struct ViolationTracker {
    bool below = false;
    double begin_t = 0.0;
    std::vector<Interval> intervals;

    void step(double t, double value) {
        if (value < 0.0 && !below) {
            below = true;
            begin_t = t;
        } else if (value >= 0.0 && below) {
            below = false;
            intervals.push_back({begin_t, t});
        }
    }
    void finish(double t) {
        if (below) {
            below = false;
            intervals.push_back({begin_t, t});
        }
    }
};

struct Quartiles {
    double first_sum = 0.0;
    long first_n = 0;
    double last_sum = 0.0;
    long last_n = 0;
};

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& cfg) {
    RunOutcome out;
    RunReport& rep = out.report;
    rep.mode = to_string(cfg.mode);
    rep.seed = cfg.seed;
    rep.dt = cfg.dt;
    rep.t_end = cfg.t_end;

    const std::string refusal = validate_scenario(cfg);
    if (!refusal.empty()) {
        rep.status = RunStatus::refused;
        rep.refusal_reason = refusal;
        return out;
    }

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    const long stride = cfg.log_stride;
    out.log.rows.reserve(static_cast<std::size_t>(n_steps / stride + 1));

    Rng rng(cfg.seed);
    StateBundle bundle;
    bundle.zp = pack(cfg.pursuer0);
    bundle.ze = pack(cfg.evader0);
    bundle.xo = cfg.obstacle0.x;

    SmcState smc = smc_init(cfg.pursuer0, cfg.smc);
    LearnerState lst = learner_init(cfg.learner);
    const bool learn = uses_learning(cfg.mode);
    const bool apply_sg = uses_safeguard(cfg.mode);
    const bool apply_smc = uses_smc(cfg.mode);

    L2Accounting l2;
    double evader_energy = 0.0, prev_ue2 = 0.0;
    std::vector<double> s_times, s_norms;
    s_times.reserve(static_cast<std::size_t>(n_steps + 1));
    s_norms.reserve(static_cast<std::size_t>(n_steps + 1));

    ViolationTracker bx_track, bv_track;
    rep.min_b_x = rep.min_b_v = rep.min_phi_x1 = std::numeric_limits<double>::infinity();
    double lambda_last = 0.0, delta_last = 0.0;
    long excitation_pass = 0, learn_steps = 0;
    Quartiles gap;
    const long q1_end = n_steps / 4;
    const long q4_begin = n_steps - n_steps / 4;

    for (long j = 0; j <= n_steps; ++j) {
        const double t = static_cast<double>(j) * cfg.dt;
        const PursuerState p = unpack_pursuer(bundle.zp);
        const EvaderState e = unpack_evader(bundle.ze);
        const Vec4 xi = bundle.zp - bundle.ze;  // derived, never integrated

        const BarrierEval be = safeguard_policy(p, bundle.xo, cfg.safeguard);
        const Vec2 u_s = apply_sg ? be.u_s : Vec2{0.0, 0.0};
        if (apply_sg && be.breach) rep.safeguard_breach = true;

        Vec2 u_n;
        if (cfg.mode == ControllerMode::safeguard_only)
            u_n = random_in_disc(rng, cfg.nominal_bound);
        else
            u_n = actor_policy(p, xi, lst.wa, cfg.game);

        smc.integral_acc = bundle.sliding_acc;
        const Vec2 s = sliding_variable(p, smc);
        if (j > 0)
            gain_update(smc, s, t, cfg.dt, cfg.smc);
        else
            smc.s = s;
        const Vec2 u_r = apply_smc ? robust_control(s, smc.K, cfg.smc.rho) : Vec2{0.0, 0.0};

        const Vec2 u_p = u_s + u_n + u_r;
        const Vec2 u_e =
            evader_tracking_controller(e, cfg.waypoints.target_at(t), cfg.evader_ctrl,
                                       cfg.nonlinear);
        const Vec2 d = disturbance_sample(t, cfg.disturbance, rng);

        if (learn) {
            const BellmanEval rt = bellman_error(xi, p, e, lst, cfg.game, cfg.nonlinear);
            SampleBatch batch = sample_batch(p, e, cfg.learner.sample_count,
                                             cfg.learner.box_halfwidth, rng);
            evaluate_batch(batch, lst, cfg.game, cfg.nonlinear, cfg.learner.parallel_batch);
            const ExcitationReport exc = excitation_monitor(batch, cfg.learner.lambda_c);
            lambda_last = exc.min_eig;
            delta_last = rt.delta;
            ++learn_steps;
            if (exc.passes) ++excitation_pass;

            bool ok = critic_update(lst, rt, batch, cfg.dt, cfg.learner);
            ok = ok && actor_update(lst, rt, batch, cfg.dt, cfg.learner, cfg.game, xi, p);
            ok = ok && perturber_update(lst, rt, batch, cfg.dt, cfg.learner, cfg.game, xi, e);
            if (!ok) {
                rep.status = RunStatus::fault;
                rep.fault_step = j;
                break;
            }
        }

        // ---- per-step bookkeeping ----
        if (be.b_x < rep.min_b_x) {
            rep.min_b_x = be.b_x;
            rep.t_min_b_x = t;
        }
        if (be.b_v < rep.min_b_v) {
            rep.min_b_v = be.b_v;
            rep.t_min_b_v = t;
        }
        rep.min_phi_x1 = std::min(rep.min_phi_x1, be.phi_x1);
        bx_track.step(t, be.b_x);
        bv_track.step(t, be.b_v);
        if (!rep.captured && std::hypot(xi[0], xi[1]) < cfg.capture_radius) {
            rep.captured = true;
            rep.capture_time = t;
        }
        s_times.push_back(t);
        const double s_norm = norm(s);
        s_norms.push_back(s_norm);
        rep.K_max = std::max(rep.K_max, smc.K);
        const double ue2 = dot(u_e, u_e);
        if (j > 0) evader_energy += 0.5 * cfg.dt * (prev_ue2 + ue2);
        prev_ue2 = ue2;
        const double gapv = norm(lst.wa - lst.wc);
        if (j < q1_end) {
            gap.first_sum += gapv;
            ++gap.first_n;
        }
        if (j >= q4_begin) {
            gap.last_sum += gapv;
            ++gap.last_n;
        }

        if (j % stride == 0) {
            const double lhs_int = quad_form(cfg.game.Q, xi) + quad_form(cfg.game.R, u_n);
            const double rhs_int = cfg.game.gamma * cfg.game.gamma * quad_form(cfg.game.T, u_e);
            l2.add_sample(cfg.dt * static_cast<double>(stride), lhs_int, rhs_int);

            LogRow row;
            std::size_t c = 0;
            row.col[c++] = t;
            for (int i = 0; i < 4; ++i) row.col[c++] = bundle.zp[i];
            for (int i = 0; i < 4; ++i) row.col[c++] = bundle.ze[i];
            row.col[c++] = bundle.xo[0];
            row.col[c++] = bundle.xo[1];
            for (int i = 0; i < 4; ++i) row.col[c++] = xi[i];
            row.col[c++] = u_n[0];
            row.col[c++] = u_n[1];
            row.col[c++] = u_r[0];
            row.col[c++] = u_r[1];
            row.col[c++] = u_s[0];
            row.col[c++] = u_s[1];
            row.col[c++] = u_p[0];
            row.col[c++] = u_p[1];
            row.col[c++] = d[0];
            row.col[c++] = d[1];
            row.col[c++] = be.b_x;
            row.col[c++] = be.b_v;
            row.col[c++] = be.phi_x1;
            row.col[c++] = s_norm;
            row.col[c++] = smc.K;
            row.col[c++] = smc.mode == SmcMode::boundary ? 1.0 : 0.0;
            for (std::size_t i = 0; i < kFeatureDim; ++i) row.col[c++] = lst.wc[i];
            for (std::size_t i = 0; i < kFeatureDim; ++i) row.col[c++] = lst.wa[i];
            for (std::size_t i = 0; i < kFeatureDim; ++i) row.col[c++] = lst.wp[i];
            row.col[c++] = delta_last;
            row.col[c++] = lambda_last;
            row.col[c++] = gram_condition(be.beta1, be.beta2).min_eig;
            row.col[c++] = frobenius_norm(lst.gamma);
            row.col[c++] = l2.lhs;
            row.col[c++] = l2.rhs;
            out.log.rows.push_back(row);
        }

        if (j < n_steps) {
            StepInputs in{u_p, u_s + u_n, u_e, d};
            if (!integrate_step(bundle, in, cfg.dt, cfg.obstacle0.approach_gain,
                                cfg.obstacle0.dest, cfg.nonlinear)) {
                rep.status = RunStatus::fault;
                rep.fault_step = j + 1;
                break;
            }
        }
    }

    bx_track.finish(cfg.t_end);
    bv_track.finish(cfg.t_end);
    rep.bx_violations = bx_track.intervals;
    rep.bv_violations = bv_track.intervals;

    const ReachingReport reach = reaching_monitor(s_times, s_norms, cfg.smc.eps);
    rep.smc_hit = reach.hit;
    rep.smc_hit_time = reach.hit ? reach.hit_time : -1.0;
    rep.smc_residence_fraction = reach.residence_fraction;
    rep.smc_max_excursion_after = reach.max_excursion_after;
    rep.K_final = smc.K;
    rep.K_cap_hit = smc.cap_hit;

    rep.l2_lhs = l2.lhs;
    rep.l2_rhs = l2.rhs;
    rep.l2_ratio = l2.ratio();
    rep.evader_energy = evader_energy;

    rep.excitation_pass_rate =
        learn_steps > 0 ? static_cast<double>(excitation_pass) / static_cast<double>(learn_steps)
                        : 0.0;
    rep.lambda_min_final = lambda_last;
    rep.wc_final = lst.wc;
    rep.wa_final = lst.wa;
    rep.wp_final = lst.wp;
    rep.wa_wc_gap_first_quarter = gap.first_n ? gap.first_sum / gap.first_n : 0.0;
    rep.wa_wc_gap_last_quarter = gap.last_n ? gap.last_sum / gap.last_n : 0.0;
    return out;
}

std::vector<ModeRun> compare_modes(const ScenarioConfig& cfg,
                                   const std::vector<ControllerMode>& modes) {
    if (modes.empty()) throw ConfigError("compare requires at least one mode");
    std::vector<ModeRun> runs(modes.size());
    const long n = static_cast<long>(modes.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        ScenarioConfig c = cfg;
        c.mode = modes[static_cast<std::size_t>(i)];
        runs[static_cast<std::size_t>(i)] = ModeRun{c.mode, run_scenario(c)};
    }
    return runs;
}

namespace {

std::string fmt_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%12.5g", v);
    return buf;
}

}  // namespace

std::string comparison_table(const std::vector<ModeRun>& runs) {
    std::ostringstream o;
    o << std::left;
    auto head = [&](const std::string& name) { o << name; };
    head("metric                ");
    for (const auto& r : runs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%16s", to_string(r.mode).c_str());
        o << buf;
    }
    o << "\n";
    auto row = [&](const std::string& name, auto getter) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%-22s", name.c_str());
        o << buf;
        for (const auto& r : runs) {
            std::snprintf(buf, sizeof buf, "%16s", fmt_metric(getter(r.outcome.report)).c_str());
            o << buf;
        }
        o << "\n";
    };
    row("capture_time", [](const RunReport& r) { return r.capture_time; });
    row("min_b_x", [](const RunReport& r) { return r.min_b_x; });
    row("min_b_v", [](const RunReport& r) { return r.min_b_v; });
    row("min_phi_x1", [](const RunReport& r) { return r.min_phi_x1; });
    row("bx_violation_count",
        [](const RunReport& r) { return static_cast<double>(r.bx_violations.size()); });
    row("bv_violation_count",
        [](const RunReport& r) { return static_cast<double>(r.bv_violations.size()); });
    row("smc_hit_time", [](const RunReport& r) { return r.smc_hit_time; });
    row("smc_residence", [](const RunReport& r) { return r.smc_residence_fraction; });
    row("K_max", [](const RunReport& r) { return r.K_max; });
    row("l2_ratio", [](const RunReport& r) { return r.l2_ratio; });
    row("|Wc|_final", [](const RunReport& r) { return norm(r.wc_final); });
    return o.str();
}

void write_merged_csv(const std::vector<ModeRun>& runs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "t";
    for (const auto& r : runs) {
        const std::string m = to_string(r.mode);
        out << "," << m << "_b_x"
            << "," << m << "_b_v"
            << "," << m << "_dist"
            << "," << m << "_vp1"
            << "," << m << "_s_norm"
            << "," << m << "_K";
    }
    out << "\n";
    std::size_t nrows = runs.empty() ? 0 : runs.front().outcome.log.rows.size();
    for (const auto& r : runs) nrows = std::min(nrows, r.outcome.log.rows.size());
    char buf[40];
    for (std::size_t i = 0; i < nrows; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", runs.front().outcome.log.rows[i].col[0]);
        out << buf;
        for (const auto& r : runs) {
            const LogRow& row = r.outcome.log.rows[i];
            const double dist = std::hypot(row.col[11], row.col[12]);
            for (double v : {row.col[25], row.col[26], dist, row.col[3], row.col[28], row.col[29]}) {
                std::snprintf(buf, sizeof buf, ",%.9g", v);
                out << buf;
            }
        }
        out << "\n";
    }
}

void write_outputs(const RunOutcome& out, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_trajectory_csv(out.log, dir + "/trajectory.csv");
    write_report_json(out.report, dir + "/report.json");
}

}  // namespace pe
