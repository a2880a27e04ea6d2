#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pe/riccati.hpp"
#include "pe/simulator.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double dt = 0;
    bool dt_set = false;
    double t_end = 0;
    bool t_end_set = false;
    int log_every = 0;
    bool log_every_set = false;
};

pe::ScenarioConfig load_with_overrides(const CommonArgs& a) {
    pe::ScenarioConfig cfg = pe::load_config(a.config_path);
    if (!a.mode.empty()) cfg.mode = pe::mode_from_string(a.mode);
    if (a.seed_set) cfg.seed = a.seed;
    if (a.dt_set) cfg.dt = a.dt;
    if (a.t_end_set) cfg.t_end = a.t_end;
    if (a.log_every_set) cfg.log_stride = a.log_every;
    return cfg;
}

int exit_code_for(const pe::RunReport& rep) {
    switch (rep.status) {
        case pe::RunStatus::ok: return 0;
        case pe::RunStatus::refused: return 2;
        case pe::RunStatus::fault: return 3;
    }
    return 0;
}

int run_simulate(const CommonArgs& a) {
    const pe::ScenarioConfig cfg = load_with_overrides(a);
    const pe::RunOutcome out = pe::run_scenario(cfg);
    if (out.report.status == pe::RunStatus::refused) {
        std::cerr << "refused to start: " << out.report.refusal_reason << "\n";
        std::filesystem::create_directories(a.out_dir.empty() ? "." : a.out_dir);
        pe::write_report_json(out.report, a.out_dir.empty() ? "report.json"
                                                            : a.out_dir + "/report.json");
        return 2;
    }
    pe::write_outputs(out, a.out_dir);
    const pe::RunReport& r = out.report;
    std::printf("mode=%s steps=%ld rows=%zu\n", r.mode.c_str(),
                std::lround(r.t_end / r.dt), out.log.rows.size());
    std::printf("min_b_x=%.6g at t=%.6g  min_b_v=%.6g at t=%.6g\n", r.min_b_x, r.t_min_b_x,
                r.min_b_v, r.t_min_b_v);
    if (r.captured)
        std::printf("capture at t=%.6g s\n", r.capture_time);
    else
        std::printf("no capture\n");
    if (r.status == pe::RunStatus::fault)
        std::fprintf(stderr, "numerical fault at step %ld (partial log written)\n", r.fault_step);
    return exit_code_for(r);
}

int run_compare(const CommonArgs& a, const std::string& modes_csv) {
    std::vector<pe::ControllerMode> modes;
    std::string tok;
    std::istringstream iss(modes_csv);
    while (std::getline(iss, tok, ','))
        if (!tok.empty()) modes.push_back(pe::mode_from_string(tok));
    const pe::ScenarioConfig cfg = load_with_overrides(a);
    const std::vector<pe::ModeRun> runs = pe::compare_modes(cfg, modes);

    std::filesystem::create_directories(a.out_dir);
    for (const auto& run : runs)
        pe::write_outputs(run.outcome, a.out_dir + "/" + pe::to_string(run.mode));
    pe::write_merged_csv(runs, a.out_dir + "/merged.csv");
    const std::string table = pe::comparison_table(runs);
    std::ofstream(a.out_dir + "/comparison.txt") << table;
    std::cout << table;
    int worst = 0;
    for (const auto& run : runs) worst = std::max(worst, exit_code_for(run.outcome.report));
    return worst;
}

int run_oracle_gare(const std::string& config_path) {
    const pe::ScenarioConfig cfg = pe::load_config(config_path);
    const pe::Mat4 A = pe::double_integrator_A();
    const pe::Mat<4, 2> B = pe::velocity_channel_B();
    const pe::GareSolution sol = pe::gare_solve(A, B, B, cfg.game);
    if (!sol.ok) {
        std::cerr << "oracle unavailable: " << sol.error << "\n";
        return 1;
    }
    std::printf("iterations = %d\nresidual = %.3e\n", sol.iterations, sol.residual);
    std::printf("P =\n");
    for (int i = 0; i < 4; ++i)
        std::printf("  % .12f % .12f % .12f % .12f\n", sol.P(i, 0), sol.P(i, 1), sol.P(i, 2),
                    sol.P(i, 3));
    const pe::Vec10 w = pe::weights_from_quadratic(sol.P);
    std::printf("W =");
    for (std::size_t i = 0; i < pe::kFeatureDim; ++i) std::printf(" %.12f", w[i]);
    std::printf("\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pursuit-evasion game simulator with a safety safeguard, adaptive "
                 "sliding-mode disturbance rejection, and an online min-max learner"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    sim->add_option("--config", sim_args.config_path, "scenario config file")->required();
    sim->add_option("--out", sim_args.out_dir, "output directory")->required();
    sim->add_option("--mode", sim_args.mode,
                    "safe-robust-rl | robust-rl | safeguard-only | nominal-only");
    sim->add_option("--seed", sim_args.seed)->each([&](const std::string&) {
        sim_args.seed_set = true;
    });
    sim->add_option("--dt", sim_args.dt)->each([&](const std::string&) { sim_args.dt_set = true; });
    sim->add_option("--t-end", sim_args.t_end)->each([&](const std::string&) {
        sim_args.t_end_set = true;
    });
    sim->add_option("--log-every", sim_args.log_every)->each([&](const std::string&) {
        sim_args.log_every_set = true;
    });

    CommonArgs cmp_args;
    std::string modes_csv;
    auto* cmp = app.add_subcommand("compare", "run several modes on one scenario");
    cmp->add_option("--config", cmp_args.config_path, "scenario config file")->required();
    cmp->add_option("--modes", modes_csv, "comma-separated mode list")->required();
    cmp->add_option("--out", cmp_args.out_dir, "output directory")->required();
    cmp->add_option("--seed", cmp_args.seed)->each([&](const std::string&) {
        cmp_args.seed_set = true;
    });
    cmp->add_option("--t-end", cmp_args.t_end)->each([&](const std::string&) {
        cmp_args.t_end_set = true;
    });

    std::string oracle_config;
    auto* oracle = app.add_subcommand("oracle", "analysis oracles");
    auto* gare = oracle->add_subcommand("gare", "linear-game Riccati weights");
    gare->add_option("--config", oracle_config, "scenario config file")->required();
    oracle->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (cmp->parsed()) return run_compare(cmp_args, modes_csv);
        if (oracle->parsed() && gare->parsed()) return run_oracle_gare(oracle_config);
    } catch (const pe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
