#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pe/simulator.hpp"

using namespace pe;

namespace {

// Small, fast scenario: far obstacle, mild disturbance, short horizon.
ScenarioConfig quick_config() {
    ScenarioConfig c;
    c.mode = ControllerMode::safe_robust_rl;
    c.dt = 1e-3;
    c.t_end = 0.5;
    c.seed = 5;
    c.log_stride = 10;
    c.pursuer0 = PursuerState{{0, 0}, {0, 0}};
    c.evader0 = EvaderState{{2, 5}, {0, 0}};
    c.waypoints.t_start = {0.0};
    c.waypoints.target = {Vec2{10.0, 10.0}};
    c.obstacle0 = ObstacleState{{30.0, 30.0}, {40.0, 40.0}, 0.05};
    c.disturbance.dw_bound = 1.0;
    c.learner.sample_count = 10;
    c.learner.wc0 = c.learner.wa0 = c.learner.wp0 =
        Vec10{0.6076, 0.9674, 1.865, 0.7862, -0.9773, 0.5243, -0.5635, 0.6471, 3.0772, -0.8426};
    return c;
}

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config round trip is exact") {
    const ScenarioConfig cfg = quick_config();
    const std::string text = config_to_string(cfg);
    const ScenarioConfig reloaded = parse_config(text, "roundtrip");
    CHECK(config_to_string(reloaded) == text);
}

TEST_CASE("missing and unknown keys are reported by name") {
    const std::string text = config_to_string(quick_config());

    // drop the [smc] K1 line
    std::string without;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line))
        if (line.rfind("K1 =", 0) != 0) without += line + "\n";
    try {
        parse_config(without, "test");
        FAIL("expected a missing-key error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("[smc] K1") != std::string::npos);
    }

    try {
        parse_config(text + "\n[smc]\nbogus = 1\n", "test");
        FAIL("expected a duplicate/unknown error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("mode strings round trip") {
    for (ControllerMode m :
         {ControllerMode::safe_robust_rl, ControllerMode::robust_rl,
          ControllerMode::safeguard_only, ControllerMode::nominal_only})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mode_from_string("bogus"), ConfigError);
}

TEST_CASE("pursuer on the evader with everything quiet stays put") {
    ScenarioConfig c = quick_config();
    c.mode = ControllerMode::nominal_only;
    c.disturbance = DisturbanceSpec{};
    c.disturbance.dw_bound = 0.0;
    c.disturbance.s1_amp = c.disturbance.c1_amp = c.disturbance.c2_amp = 0.0;
    c.evader0 = EvaderState{{0, 0}, {0, 0}};
    c.pursuer0 = PursuerState{{0, 0}, {0, 0}};
    c.waypoints.t_start = {0.0};
    c.waypoints.target = {Vec2{0.0, 0.0}};
    const RunOutcome out = run_scenario(c);
    REQUIRE(out.report.status == RunStatus::ok);
    for (const auto& row : out.log.rows)
        for (int i = 11; i < 15; ++i) CHECK(row.col[i] == 0.0);  // xi columns
}

TEST_CASE("log row count and relative-state consistency") {
    ScenarioConfig c = quick_config();
    const RunOutcome out = run_scenario(c);
    REQUIRE(out.report.status == RunStatus::ok);
    const std::size_t expected =
        static_cast<std::size_t>(c.t_end / (c.dt * c.log_stride)) + 1;
    CHECK(out.log.rows.size() == expected);
    for (const auto& row : out.log.rows) {
        // xi == zp - ze bitwise, never integrated separately
        CHECK(row.col[11] == row.col[1] - row.col[5]);
        CHECK(row.col[12] == row.col[2] - row.col[6]);
        CHECK(row.col[13] == row.col[3] - row.col[7]);
        CHECK(row.col[14] == row.col[4] - row.col[8]);
    }
    // strictly increasing time
    for (std::size_t i = 1; i < out.log.rows.size(); ++i)
        CHECK(out.log.rows[i].col[0] > out.log.rows[i - 1].col[0]);
}

TEST_CASE("identical seeds give byte-identical outputs") {
    const ScenarioConfig c = quick_config();
    const RunOutcome a = run_scenario(c);
    const RunOutcome b = run_scenario(c);
    REQUIRE(a.log.rows.size() == b.log.rows.size());

    namespace fs = std::filesystem;
    const fs::path dir_a = fs::temp_directory_path() / "pe_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "pe_det_b";
    write_outputs(a, dir_a.string());
    write_outputs(b, dir_b.string());
    CHECK(file_bytes((dir_a / "trajectory.csv").string()) ==
          file_bytes((dir_b / "trajectory.csv").string()));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("unsafe initial state refuses to run") {
    ScenarioConfig c = quick_config();
    c.pursuer0 = PursuerState{{29.0, 30.0}, {0, 0}};  // inside the exclusion ball
    const RunOutcome out = run_scenario(c);
    CHECK(out.report.status == RunStatus::refused);
    CHECK(out.report.refusal_reason.find("position barrier") != std::string::npos);
    CHECK(out.log.rows.empty());

    ScenarioConfig c2 = quick_config();
    c2.pursuer0.v[0] = -30.0;  // below the velocity floor
    CHECK(run_scenario(c2).report.status == RunStatus::refused);

    ScenarioConfig c3 = quick_config();
    c3.obstacle0.approach_gain = 10.0;  // declared speed bound now violated
    const RunOutcome out3 = run_scenario(c3);
    CHECK(out3.report.status == RunStatus::refused);
    CHECK(out3.report.refusal_reason.find("eta") != std::string::npos);
}

TEST_CASE("non-finite learner update faults with a step index") {
    ScenarioConfig c = quick_config();
    c.learner.kc1 = 1e308;  // overflow on the first update
    const RunOutcome out = run_scenario(c);
    CHECK(out.report.status == RunStatus::fault);
    CHECK(out.report.fault_step == 0);
}

TEST_CASE("compare runs modes under one seed and rejects an empty list") {
    ScenarioConfig c = quick_config();
    CHECK_THROWS_AS(compare_modes(c, {}), ConfigError);

    const auto runs = compare_modes(
        c, {ControllerMode::safe_robust_rl, ControllerMode::safe_robust_rl});
    REQUIRE(runs.size() == 2);
    REQUIRE(runs[0].outcome.log.rows.size() == runs[1].outcome.log.rows.size());
    for (std::size_t i = 0; i < runs[0].outcome.log.rows.size(); ++i)
        for (std::size_t k = 0; k < kLogColumns; ++k)
            CHECK(runs[0].outcome.log.rows[i].col[k] == runs[1].outcome.log.rows[i].col[k]);

    const std::string table = comparison_table(runs);
    CHECK(table.find("min_b_x") != std::string::npos);
}

TEST_CASE("weights stay bounded on the full reference scenario") {
    // reference scenario values (matches scenarios/paper_sec5.cfg)
    ScenarioConfig c;
    c.mode = ControllerMode::safe_robust_rl;
    c.dt = 1e-3;
    c.t_end = 25.0;
    c.seed = 1;
    c.log_stride = 10;
    c.pursuer0 = PursuerState{{0, 0}, {0, 0}};
    c.evader0 = EvaderState{{2, 5}, {0, 0}};
    c.evader_ctrl.k1 = 5.0;
    c.evader_ctrl.k2 = 2.0;
    c.evader_ctrl.u_max = 23.0;
    c.waypoints.t_start = {0.0, 6.0, 10.0, 15.0};
    c.waypoints.target = {Vec2{38, 10}, Vec2{10, 25}, Vec2{42, 36}, Vec2{10, 48}};
    c.obstacle0 = ObstacleState{{10, 10}, {40, 40}, 0.05};
    c.learner.gamma0 = 70.0;
    c.learner.wc0 = c.learner.wa0 = c.learner.wp0 =
        Vec10{0.6076, 0.9674, 1.865, 0.7862, -0.9773, 0.5243, -0.5635, 0.6471, 3.0772, -0.8426};
    const RunOutcome out = run_scenario(c);
    REQUIRE(out.report.status == RunStatus::ok);
    CHECK(norm(out.report.wc_final) < c.learner.w_bar);
    CHECK(norm(out.report.wa_final) <= c.learner.w_bar + 1e-9);
    CHECK(norm(out.report.wp_final) <= c.learner.w_bar + 1e-9);
    for (const auto& row : out.log.rows)
        for (std::size_t k = 31; k < 61; ++k) CHECK(std::isfinite(row.col[k]));
    CHECK(out.report.wa_wc_gap_first_quarter < 1.0);
    CHECK(out.report.wa_wc_gap_last_quarter < 1.0);
}

TEST_CASE("actor-critic gap shrinks where excitation is maintained") {
    // Linear scenario with sustained excitation: the disagreement between
    // actor and critic must settle as learning converges. On the planar
    // chase the far-field phase starves the normalized regressors, so the
    // trend is asserted here, where the excitation monitor passes throughout.
    ScenarioConfig c;
    c.mode = ControllerMode::nominal_only;
    c.nonlinear = false;
    c.dt = 1e-3;
    c.t_end = 20.0;
    c.seed = 7;
    c.log_stride = 10;
    c.pursuer0 = PursuerState{{0, 0}, {0, 0}};
    c.evader0 = EvaderState{{2, 5}, {0, 0}};
    c.waypoints.t_start = {0.0, 8.0, 14.0};
    c.waypoints.target = {Vec2{6, 8}, Vec2{-4, 5}, Vec2{3, -6}};
    c.obstacle0 = ObstacleState{{1000, 1000}, {1000, 1000}, 0.05};
    c.disturbance.dw_bound = 0.0;
    c.disturbance.s1_amp = c.disturbance.c1_amp = c.disturbance.c2_amp = 0.0;
    c.safeguard.v_min = -1000.0;
    c.learner.ka1 = 100.0;
    c.learner.kp1 = 100.0;
    c.learner.ka2 = 1e-6;
    c.learner.kp2 = 1e-6;
    c.learner.beta = 1.0;
    c.learner.gamma0 = 1000.0;
    c.learner.gamma_hi = 1e6;
    c.learner.lambda_c = 1e-9;
    c.learner.wc0 = c.learner.wa0 = c.learner.wp0 =
        Vec10{0.6076, 0.9674, 1.865, 0.7862, -0.9773, 0.5243, -0.5635, 0.6471, 3.0772, -0.8426};
    const RunOutcome out = run_scenario(c);
    REQUIRE(out.report.status == RunStatus::ok);
    CHECK(out.report.excitation_pass_rate == 1.0);
    CHECK(out.report.wa_wc_gap_last_quarter < out.report.wa_wc_gap_first_quarter);
}

TEST_CASE("safeguard-only mode keeps the learner frozen and bounds the nominal") {
    ScenarioConfig c = quick_config();
    c.mode = ControllerMode::safeguard_only;
    c.nominal_bound = 3.0;
    const RunOutcome out = run_scenario(c);
    REQUIRE(out.report.status == RunStatus::ok);
    for (const auto& row : out.log.rows) {
        const double un = std::hypot(row.col[15], row.col[16]);
        CHECK(un <= c.nominal_bound + 1e-12);
        // weights must not move
        CHECK(row.col[31] == c.learner.wc0[0]);
        CHECK(row.col[41] == c.learner.wa0[0]);
    }
}
