#include "pe/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pe {

const std::array<const char*, kLogColumns> kLogHeader = {
    "t",
    "xp1", "xp2", "vp1", "vp2",
    "xe1", "xe2", "ve1", "ve2",
    "xo1", "xo2",
    "xi1", "xi2", "xi3", "xi4",
    "un1", "un2",
    "ur1", "ur2",
    "us1", "us2",
    "up1", "up2",
    "d1", "d2",
    "b_x", "b_v", "phi_x1",
    "s_norm", "K", "smc_mode",
    "Wc0", "Wc1", "Wc2", "Wc3", "Wc4", "Wc5", "Wc6", "Wc7", "Wc8", "Wc9",
    "Wa0", "Wa1", "Wa2", "Wa3", "Wa4", "Wa5", "Wa6", "Wa7", "Wa8", "Wa9",
    "Wp0", "Wp1", "Wp2", "Wp3", "Wp4", "Wp5", "Wp6", "Wp7", "Wp8", "Wp9",
    "delta", "lambda_min", "gram_min_eig", "gamma_norm",
    "l2_lhs", "l2_rhs"};

namespace {

// 9 significant digits, enough to make reruns byte-comparable while staying
// human-readable.
void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}

std::string intervals_to_string(const std::vector<Interval>& iv) {
    std::string s;
    char buf[80];
    for (std::size_t i = 0; i < iv.size(); ++i) {
        std::snprintf(buf, sizeof buf, "[%.6g,%.6g]", iv[i].t_begin, iv[i].t_end);
        if (i) s += ";";
        s += buf;
    }
    return s;
}

}  // namespace

void write_trajectory_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    std::string line;
    for (std::size_t i = 0; i < kLogColumns; ++i) {
        if (i) line += ",";
        line += kLogHeader[i];
    }
    line += "\n";
    out << line;
    for (const auto& row : log.rows) {
        line.clear();
        for (std::size_t i = 0; i < kLogColumns; ++i) {
            if (i) line += ",";
            append_number(line, row.col[i]);
        }
        line += "\n";
        out << line;
    }
}

std::string report_to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["status"] = r.status == RunStatus::ok ? "ok"
                  : r.status == RunStatus::refused ? "refused"
                                                   : "fault";
    j["mode"] = r.mode;
    j["seed"] = r.seed;
    j["dt"] = r.dt;
    j["t_end"] = r.t_end;
    if (!r.refusal_reason.empty()) j["refusal_reason"] = r.refusal_reason;
    j["fault_step"] = r.fault_step;
    j["captured"] = r.captured;
    j["capture_time"] = r.capture_time;
    j["min_b_x"] = r.min_b_x;
    j["t_min_b_x"] = r.t_min_b_x;
    j["min_b_v"] = r.min_b_v;
    j["t_min_b_v"] = r.t_min_b_v;
    j["min_phi_x1"] = r.min_phi_x1;
    j["bx_violations"] = intervals_to_string(r.bx_violations);
    j["bv_violations"] = intervals_to_string(r.bv_violations);
    j["safeguard_breach"] = r.safeguard_breach;
    j["smc_hit"] = r.smc_hit;
    j["smc_hit_time"] = r.smc_hit_time;
    j["smc_residence_fraction"] = r.smc_residence_fraction;
    j["smc_max_excursion_after"] = r.smc_max_excursion_after;
    j["K_final"] = r.K_final;
    j["K_max"] = r.K_max;
    j["K_cap_hit"] = r.K_cap_hit;
    j["l2_lhs"] = r.l2_lhs;
    j["l2_rhs"] = r.l2_rhs;
    j["l2_ratio"] = r.l2_ratio;
    j["evader_energy"] = r.evader_energy;
    j["excitation_pass_rate"] = r.excitation_pass_rate;
    j["lambda_min_final"] = r.lambda_min_final;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        j["Wc" + std::to_string(i)] = r.wc_final[i];
        j["Wa" + std::to_string(i)] = r.wa_final[i];
        j["Wp" + std::to_string(i)] = r.wp_final[i];
    }
    j["wa_wc_gap_first_quarter"] = r.wa_wc_gap_first_quarter;
    j["wa_wc_gap_last_quarter"] = r.wa_wc_gap_last_quarter;
    return j.dump(2);
}

void write_report_json(const RunReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << report_to_json(rep) << "\n";
}

}  // namespace pe
