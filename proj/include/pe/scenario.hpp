#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "pe/dynamics.hpp"
#include "pe/game.hpp"
#include "pe/learner.hpp"
#include "pe/safeguard.hpp"
#include "pe/smc.hpp"

namespace pe {

// Controller composition of a run. The safeguard is evaluated in every mode
// for logging; it only acts on the plant where listed.
//   safe-robust-rl : u_s + u_n(actor) + u_r, learning on
//   robust-rl      : u_n(actor) + u_r, learning on
//   safeguard-only : u_s + random bounded nominal, learning off
//   nominal-only   : u_n(actor), learning on
enum class ControllerMode { safe_robust_rl, robust_rl, safeguard_only, nominal_only };

std::string to_string(ControllerMode m);
ControllerMode mode_from_string(const std::string& s);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    ControllerMode mode = ControllerMode::safe_robust_rl;
    double dt = 1e-3;
    double t_end = 25.0;
    std::uint64_t seed = 1;
    int log_stride = 10;
    double capture_radius = 1.0;   // |xi_x| below this counts as capture
    double nominal_bound = 10.0;   // random nominal magnitude, safeguard-only

    bool nonlinear = true;

    PursuerState pursuer0;
    EvaderState evader0;
    EvaderControlConfig evader_ctrl;
    WaypointSchedule waypoints;
    ObstacleState obstacle0;
    DisturbanceSpec disturbance;

    SafeguardConfig safeguard;
    SmcConfig smc;
    LearnerConfig learner;
    GameConfig game;
};

// Strict key-value loader: every key is required, unknown keys are errors,
// messages name the offending [section] key.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");

std::string config_to_string(const ScenarioConfig& cfg);
void write_config(const ScenarioConfig& cfg, const std::string& path);

// Start-of-run admissibility: initial state strictly inside the safe set and
// the obstacle speed within its declared bound. Returns an explanation for
// refusal, empty string when admissible.
std::string validate_scenario(const ScenarioConfig& cfg);

}  // namespace pe
