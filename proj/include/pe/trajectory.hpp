#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pe/features.hpp"
#include "pe/linalg.hpp"

namespace pe {

// One logged simulation step. Column order of the CSV output is fixed and
// matches the field order here.
inline constexpr std::size_t kLogColumns = 67;

extern const std::array<const char*, kLogColumns> kLogHeader;

struct LogRow {
    std::array<double, kLogColumns> col{};
};

struct TrajectoryLog {
    std::vector<LogRow> rows;
};

struct Interval {
    double t_begin = 0.0;
    double t_end = 0.0;
};

enum class RunStatus { ok, refused, fault };

struct RunReport {
    RunStatus status = RunStatus::ok;
    std::string mode;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double t_end = 0.0;
    std::string refusal_reason;
    long fault_step = -1;

    bool captured = false;
    double capture_time = -1.0;  // first |xi_x| < capture radius

    double min_b_x = 0.0;
    double t_min_b_x = 0.0;
    double min_b_v = 0.0;
    double t_min_b_v = 0.0;
    double min_phi_x1 = 0.0;
    std::vector<Interval> bx_violations;
    std::vector<Interval> bv_violations;
    bool safeguard_breach = false;  // safeguard was active and a barrier hit zero

    bool smc_hit = false;
    double smc_hit_time = -1.0;
    double smc_residence_fraction = 0.0;
    double smc_max_excursion_after = 0.0;
    double K_final = 0.0;
    double K_max = 0.0;
    bool K_cap_hit = false;

    double l2_lhs = 0.0;
    double l2_rhs = 0.0;
    double l2_ratio = 0.0;
    double evader_energy = 0.0;  // integral of |u_e|^2, logged not enforced

    double excitation_pass_rate = 0.0;
    double lambda_min_final = 0.0;
    Vec10 wc_final;
    Vec10 wa_final;
    Vec10 wp_final;
    // Convergence trend of |Wa - Wc|: time averages over the first and last
    // quarter of the run.
    double wa_wc_gap_first_quarter = 0.0;
    double wa_wc_gap_last_quarter = 0.0;
};

void write_trajectory_csv(const TrajectoryLog& log, const std::string& path);
void write_report_json(const RunReport& rep, const std::string& path);
std::string report_to_json(const RunReport& rep);

}  // namespace pe
