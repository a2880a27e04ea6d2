#pragma once

#include <string>
#include <vector>

#include "pe/scenario.hpp"
#include "pe/trajectory.hpp"

namespace pe {

struct RunOutcome {
    TrajectoryLog log;
    RunReport report;
};

// Executes one scenario: per control step the safeguard leads, the actor
// supplies the nominal input, the sliding-mode term follows, the plant
// integrates one fixed step, and the learner updates from the measured state
// plus a fresh simulated batch. Deterministic for a fixed config and seed.
// An inadmissible initial state refuses to run (status = refused).
RunOutcome run_scenario(const ScenarioConfig& cfg);

struct ModeRun {
    ControllerMode mode;
    RunOutcome outcome;
};

// Runs each mode on the same scenario and seed. Throws ConfigError for an
// empty mode list.
std::vector<ModeRun> compare_modes(const ScenarioConfig& cfg,
                                   const std::vector<ControllerMode>& modes);

// Side-by-side metric table of compare_modes results.
std::string comparison_table(const std::vector<ModeRun>& runs);

// Time-aligned per-mode safety/diagnostic columns in one file.
void write_merged_csv(const std::vector<ModeRun>& runs, const std::string& path);

// trajectory.csv + report.json under `dir` (created if needed).
void write_outputs(const RunOutcome& out, const std::string& dir);

}  // namespace pe
