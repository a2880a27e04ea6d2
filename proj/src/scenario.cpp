#include "pe/scenario.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace pe {

std::string to_string(ControllerMode m) {
    switch (m) {
        case ControllerMode::safe_robust_rl: return "safe-robust-rl";
        case ControllerMode::robust_rl: return "robust-rl";
        case ControllerMode::safeguard_only: return "safeguard-only";
        case ControllerMode::nominal_only: return "nominal-only";
    }
    return "safe-robust-rl";
}

ControllerMode mode_from_string(const std::string& s) {
    if (s == "safe-robust-rl") return ControllerMode::safe_robust_rl;
    if (s == "robust-rl") return ControllerMode::robust_rl;
    if (s == "safeguard-only") return ControllerMode::safeguard_only;
    if (s == "nominal-only") return ControllerMode::nominal_only;
    throw ConfigError("unknown controller mode '" + s +
                      "' (expected safe-robust-rl, robust-rl, safeguard-only, nominal-only)");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Parsed file plus consumption tracking so unknown keys can be reported.
struct KvTree {
    std::string origin;
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::set<std::string> consumed;  // "section/key"

    const std::string& require(const std::string& sec, const std::string& key) {
        auto s = sections.find(sec);
        if (s == sections.end())
            throw ConfigError(origin + ": missing section [" + sec + "]");
        auto k = s->second.find(key);
        if (k == s->second.end())
            throw ConfigError(origin + ": missing key [" + sec + "] " + key);
        consumed.insert(sec + "/" + key);
        return k->second;
    }

    double get_double(const std::string& sec, const std::string& key) {
        const std::string& v = require(sec, key);
        std::size_t pos = 0;
        double d = 0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError(origin + ": [" + sec + "] " + key + ": not a number: '" + v + "'");
        }
        if (trim(v.substr(pos)) != "")
            throw ConfigError(origin + ": [" + sec + "] " + key + ": trailing junk in '" + v + "'");
        return d;
    }

    std::uint64_t get_u64(const std::string& sec, const std::string& key) {
        const std::string& v = require(sec, key);
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw ConfigError(origin + ": [" + sec + "] " + key + ": not an integer: '" + v + "'");
        }
    }

    int get_int(const std::string& sec, const std::string& key) {
        return static_cast<int>(get_double(sec, key));
    }

    bool get_bool(const std::string& sec, const std::string& key) {
        const std::string& v = require(sec, key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError(origin + ": [" + sec + "] " + key + ": expected true/false, got '" + v +
                          "'");
    }

    std::vector<double> get_list(const std::string& sec, const std::string& key) {
        std::istringstream iss(require(sec, key));
        std::vector<double> out;
        std::string tok;
        while (iss >> tok) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError(origin + ": [" + sec + "] " + key + ": not a number: '" + tok +
                                  "'");
            }
        }
        return out;
    }

    Vec2 get_vec2(const std::string& sec, const std::string& key) {
        auto v = get_list(sec, key);
        if (v.size() != 2)
            throw ConfigError(origin + ": [" + sec + "] " + key + ": expected 2 values, got " +
                              std::to_string(v.size()));
        return Vec2{v[0], v[1]};
    }

    Vec10 get_vec10(const std::string& sec, const std::string& key) {
        auto v = get_list(sec, key);
        if (v.size() != 10)
            throw ConfigError(origin + ": [" + sec + "] " + key + ": expected 10 values, got " +
                              std::to_string(v.size()));
        Vec10 out;
        for (std::size_t i = 0; i < 10; ++i) out[i] = v[i];
        return out;
    }

    void fail_on_unconsumed() const {
        for (const auto& [sec, kvs] : sections)
            for (const auto& [key, val] : kvs)
                if (!consumed.count(sec + "/" + key))
                    throw ConfigError(origin + ": unknown key [" + sec + "] " + key);
    }
};

KvTree parse_kv(const std::string& text, const std::string& origin) {
    KvTree tree;
    tree.origin = origin;
    std::istringstream iss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            tree.sections[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside a section");
        if (tree.sections[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key [" +
                              section + "] " + key);
        tree.sections[section][key] = val;
    }
    return tree;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec2& v) { return fmt(v[0]) + " " + fmt(v[1]); }

std::string fmt(const Vec10& v) {
    std::string s;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i) s += " ";
        s += fmt(v[i]);
    }
    return s;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    KvTree kv = parse_kv(text, origin);
    ScenarioConfig c;

    c.mode = mode_from_string(kv.require("sim", "mode"));
    c.dt = kv.get_double("sim", "dt");
    c.t_end = kv.get_double("sim", "t_end");
    c.seed = kv.get_u64("sim", "seed");
    c.log_stride = kv.get_int("sim", "log_stride");
    c.capture_radius = kv.get_double("sim", "capture_radius");
    c.nominal_bound = kv.get_double("sim", "nominal_bound");
    if (c.dt <= 0.0) throw ConfigError(origin + ": [sim] dt must be positive");
    if (c.t_end <= 0.0) throw ConfigError(origin + ": [sim] t_end must be positive");
    if (c.log_stride < 1) throw ConfigError(origin + ": [sim] log_stride must be >= 1");

    c.nonlinear = kv.get_bool("dynamics", "nonlinear");

    c.pursuer0.x = kv.get_vec2("pursuer", "x0");
    c.pursuer0.v = kv.get_vec2("pursuer", "v0");

    c.evader0.x = kv.get_vec2("evader", "x0");
    c.evader0.v = kv.get_vec2("evader", "v0");
    c.evader_ctrl.k1 = kv.get_double("evader", "k1");
    c.evader_ctrl.k2 = kv.get_double("evader", "k2");
    c.evader_ctrl.u_max = kv.get_double("evader", "u_max");
    c.evader_ctrl.cancel_drift = kv.get_bool("evader", "cancel_drift");
    {
        auto flat = kv.get_list("evader", "waypoints");
        if (flat.empty() || flat.size() % 3 != 0)
            throw ConfigError(origin +
                              ": [evader] waypoints: expected (t x y) triples, got " +
                              std::to_string(flat.size()) + " values");
        for (std::size_t i = 0; i + 2 < flat.size() + 1; i += 3) {
            if (!c.waypoints.t_start.empty() && flat[i] <= c.waypoints.t_start.back())
                throw ConfigError(origin + ": [evader] waypoints: start times must increase");
            c.waypoints.t_start.push_back(flat[i]);
            c.waypoints.target.push_back(Vec2{flat[i + 1], flat[i + 2]});
        }
    }

    c.obstacle0.x = kv.get_vec2("obstacle", "x0");
    c.obstacle0.dest = kv.get_vec2("obstacle", "dest");
    c.obstacle0.approach_gain = kv.get_double("obstacle", "approach_gain");

    c.disturbance.dw_bound = kv.get_double("disturbance", "dw_bound");
    c.disturbance.s1_amp = kv.get_double("disturbance", "s1_amp");
    c.disturbance.s1_omega = kv.get_double("disturbance", "s1_omega");
    c.disturbance.c1_amp = kv.get_double("disturbance", "c1_amp");
    c.disturbance.c1_omega = kv.get_double("disturbance", "c1_omega");
    c.disturbance.c2_amp = kv.get_double("disturbance", "c2_amp");
    c.disturbance.c2_omega = kv.get_double("disturbance", "c2_omega");

    c.safeguard.k_p = kv.get_double("safeguard", "k_p");
    c.safeguard.r_o = kv.get_double("safeguard", "r_o");
    c.safeguard.v_min = kv.get_double("safeguard", "v_min");
    c.safeguard.p1 = kv.get_double("safeguard", "p1");
    c.safeguard.p2 = kv.get_double("safeguard", "p2");
    c.safeguard.k = kv.get_double("safeguard", "k");
    c.safeguard.eta = kv.get_double("safeguard", "eta");
    c.safeguard.Kx = kv.get_double("safeguard", "Kx");
    c.safeguard.Kv = kv.get_double("safeguard", "Kv");
    c.safeguard.paper_sim_variant = kv.get_bool("safeguard", "paper_sim_variant");
    c.safeguard.nonlinear_drift = c.nonlinear;
    for (double g : {c.safeguard.k_p, c.safeguard.r_o, c.safeguard.p1, c.safeguard.p2,
                     c.safeguard.k, c.safeguard.Kx, c.safeguard.Kv})
        if (g <= 0.0) throw ConfigError(origin + ": [safeguard] gains and r_o must be positive");

    c.smc.K1 = kv.get_double("smc", "K1");
    c.smc.K2 = kv.get_double("smc", "K2");
    c.smc.K3 = kv.get_double("smc", "K3");
    c.smc.K4 = kv.get_double("smc", "K4");
    c.smc.rho = kv.get_double("smc", "rho");
    c.smc.eps = kv.get_double("smc", "eps");
    c.smc.K0 = kv.get_double("smc", "K0");
    c.smc.K_cap = kv.get_double("smc", "K_cap");
    for (double g : {c.smc.K1, c.smc.K2, c.smc.K3, c.smc.K4, c.smc.rho, c.smc.eps, c.smc.K0})
        if (g <= 0.0) throw ConfigError(origin + ": [smc] parameters must be positive");

    c.learner.kc1 = kv.get_double("learner", "kc1");
    c.learner.kc2 = kv.get_double("learner", "kc2");
    c.learner.ka1 = kv.get_double("learner", "ka1");
    c.learner.ka2 = kv.get_double("learner", "ka2");
    c.learner.kp1 = kv.get_double("learner", "kp1");
    c.learner.kp2 = kv.get_double("learner", "kp2");
    c.learner.beta = kv.get_double("learner", "beta");
    c.learner.sample_count = kv.get_int("learner", "N");
    c.learner.w_bar = kv.get_double("learner", "W_bar");
    c.learner.gamma0 = kv.get_double("learner", "gamma0");
    c.learner.gamma_lo = kv.get_double("learner", "gamma_lo");
    c.learner.gamma_hi = kv.get_double("learner", "gamma_hi");
    c.learner.box_halfwidth = kv.get_double("learner", "box_halfwidth");
    c.learner.lambda_c = kv.get_double("learner", "lambda_c");
    c.learner.parallel_batch = kv.get_bool("learner", "parallel_batch");
    c.learner.wc0 = kv.get_vec10("learner", "Wc0");
    c.learner.wa0 = kv.get_vec10("learner", "Wa0");
    c.learner.wp0 = kv.get_vec10("learner", "Wp0");
    if (c.learner.sample_count < 1)
        throw ConfigError(origin + ": [learner] N must be >= 1");

    {
        auto q = kv.get_list("game", "q_diag");
        auto r = kv.get_list("game", "r_diag");
        auto t = kv.get_list("game", "t_diag");
        if (q.size() != 4) throw ConfigError(origin + ": [game] q_diag: expected 4 values");
        if (r.size() != 2) throw ConfigError(origin + ": [game] r_diag: expected 2 values");
        if (t.size() != 2) throw ConfigError(origin + ": [game] t_diag: expected 2 values");
        c.game.Q = Mat4{};
        c.game.R = Mat2{};
        c.game.T = Mat2{};
        for (std::size_t i = 0; i < 4; ++i) c.game.Q(i, i) = q[i];
        for (std::size_t i = 0; i < 2; ++i) c.game.R(i, i) = r[i];
        for (std::size_t i = 0; i < 2; ++i) c.game.T(i, i) = t[i];
        c.game.gamma = kv.get_double("game", "gamma");
        for (double v : q)
            if (v <= 0.0) throw ConfigError(origin + ": [game] q_diag must be positive");
        for (double v : r)
            if (v <= 0.0) throw ConfigError(origin + ": [game] r_diag must be positive");
        for (double v : t)
            if (v <= 0.0) throw ConfigError(origin + ": [game] t_diag must be positive");
        if (c.game.gamma <= 0.0) throw ConfigError(origin + ": [game] gamma must be positive");
    }

    kv.fail_on_unconsumed();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string config_to_string(const ScenarioConfig& c) {
    std::ostringstream o;
    o << "[sim]\n";
    o << "mode = " << to_string(c.mode) << "\n";
    o << "dt = " << fmt(c.dt) << "\n";
    o << "t_end = " << fmt(c.t_end) << "\n";
    o << "seed = " << c.seed << "\n";
    o << "log_stride = " << c.log_stride << "\n";
    o << "capture_radius = " << fmt(c.capture_radius) << "\n";
    o << "nominal_bound = " << fmt(c.nominal_bound) << "\n";
    o << "\n[dynamics]\n";
    o << "nonlinear = " << (c.nonlinear ? "true" : "false") << "\n";
    o << "\n[pursuer]\n";
    o << "x0 = " << fmt(c.pursuer0.x) << "\n";
    o << "v0 = " << fmt(c.pursuer0.v) << "\n";
    o << "\n[evader]\n";
    o << "x0 = " << fmt(c.evader0.x) << "\n";
    o << "v0 = " << fmt(c.evader0.v) << "\n";
    o << "k1 = " << fmt(c.evader_ctrl.k1) << "\n";
    o << "k2 = " << fmt(c.evader_ctrl.k2) << "\n";
    o << "u_max = " << fmt(c.evader_ctrl.u_max) << "\n";
    o << "cancel_drift = " << (c.evader_ctrl.cancel_drift ? "true" : "false") << "\n";
    o << "waypoints =";
    for (std::size_t i = 0; i < c.waypoints.t_start.size(); ++i)
        o << "  " << fmt(c.waypoints.t_start[i]) << " " << fmt(c.waypoints.target[i]);
    o << "\n";
    o << "\n[obstacle]\n";
    o << "x0 = " << fmt(c.obstacle0.x) << "\n";
    o << "dest = " << fmt(c.obstacle0.dest) << "\n";
    o << "approach_gain = " << fmt(c.obstacle0.approach_gain) << "\n";
    o << "\n[disturbance]\n";
    o << "dw_bound = " << fmt(c.disturbance.dw_bound) << "\n";
    o << "s1_amp = " << fmt(c.disturbance.s1_amp) << "\n";
    o << "s1_omega = " << fmt(c.disturbance.s1_omega) << "\n";
    o << "c1_amp = " << fmt(c.disturbance.c1_amp) << "\n";
    o << "c1_omega = " << fmt(c.disturbance.c1_omega) << "\n";
    o << "c2_amp = " << fmt(c.disturbance.c2_amp) << "\n";
    o << "c2_omega = " << fmt(c.disturbance.c2_omega) << "\n";
    o << "\n[safeguard]\n";
    o << "k_p = " << fmt(c.safeguard.k_p) << "\n";
    o << "r_o = " << fmt(c.safeguard.r_o) << "\n";
    o << "v_min = " << fmt(c.safeguard.v_min) << "\n";
    o << "p1 = " << fmt(c.safeguard.p1) << "\n";
    o << "p2 = " << fmt(c.safeguard.p2) << "\n";
    o << "k = " << fmt(c.safeguard.k) << "\n";
    o << "eta = " << fmt(c.safeguard.eta) << "\n";
    o << "Kx = " << fmt(c.safeguard.Kx) << "\n";
    o << "Kv = " << fmt(c.safeguard.Kv) << "\n";
    o << "paper_sim_variant = " << (c.safeguard.paper_sim_variant ? "true" : "false") << "\n";
    o << "\n[smc]\n";
    o << "K1 = " << fmt(c.smc.K1) << "\n";
    o << "K2 = " << fmt(c.smc.K2) << "\n";
    o << "K3 = " << fmt(c.smc.K3) << "\n";
    o << "K4 = " << fmt(c.smc.K4) << "\n";
    o << "rho = " << fmt(c.smc.rho) << "\n";
    o << "eps = " << fmt(c.smc.eps) << "\n";
    o << "K0 = " << fmt(c.smc.K0) << "\n";
    o << "K_cap = " << fmt(c.smc.K_cap) << "\n";
    o << "\n[learner]\n";
    o << "kc1 = " << fmt(c.learner.kc1) << "\n";
    o << "kc2 = " << fmt(c.learner.kc2) << "\n";
    o << "ka1 = " << fmt(c.learner.ka1) << "\n";
    o << "ka2 = " << fmt(c.learner.ka2) << "\n";
    o << "kp1 = " << fmt(c.learner.kp1) << "\n";
    o << "kp2 = " << fmt(c.learner.kp2) << "\n";
    o << "beta = " << fmt(c.learner.beta) << "\n";
    o << "N = " << c.learner.sample_count << "\n";
    o << "W_bar = " << fmt(c.learner.w_bar) << "\n";
    o << "gamma0 = " << fmt(c.learner.gamma0) << "\n";
    o << "gamma_lo = " << fmt(c.learner.gamma_lo) << "\n";
    o << "gamma_hi = " << fmt(c.learner.gamma_hi) << "\n";
    o << "box_halfwidth = " << fmt(c.learner.box_halfwidth) << "\n";
    o << "lambda_c = " << fmt(c.learner.lambda_c) << "\n";
    o << "parallel_batch = " << (c.learner.parallel_batch ? "true" : "false") << "\n";
    o << "Wc0 = " << fmt(c.learner.wc0) << "\n";
    o << "Wa0 = " << fmt(c.learner.wa0) << "\n";
    o << "Wp0 = " << fmt(c.learner.wp0) << "\n";
    o << "\n[game]\n";
    o << "q_diag = " << fmt(c.game.Q(0, 0)) << " " << fmt(c.game.Q(1, 1)) << " "
      << fmt(c.game.Q(2, 2)) << " " << fmt(c.game.Q(3, 3)) << "\n";
    o << "r_diag = " << fmt(c.game.R(0, 0)) << " " << fmt(c.game.R(1, 1)) << "\n";
    o << "t_diag = " << fmt(c.game.T(0, 0)) << " " << fmt(c.game.T(1, 1)) << "\n";
    o << "gamma = " << fmt(c.game.gamma) << "\n";
    return o.str();
}

void write_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_string(cfg);
}

std::string validate_scenario(const ScenarioConfig& cfg) {
    const double b_x = barrier_position(cfg.pursuer0, cfg.obstacle0.x, cfg.safeguard);
    const double b_v = barrier_velocity(cfg.pursuer0, cfg.safeguard);
    const PhiChain chain = phi_chain(cfg.pursuer0, cfg.obstacle0.x, cfg.safeguard);
    std::ostringstream why;
    if (!(b_x > 0.0))
        why << "initial state violates position barrier (b_x = " << b_x << "); ";
    if (!(chain.phi_x1 > 0.0))
        why << "initial state violates barrier chain (phi_x1 = " << chain.phi_x1 << "); ";
    if (!(b_v > 0.0))
        why << "initial state violates velocity barrier (b_v = " << b_v << "); ";
    const double obstacle_speed =
        cfg.obstacle0.approach_gain * norm(cfg.obstacle0.x - cfg.obstacle0.dest);
    if (obstacle_speed > cfg.safeguard.eta)
        why << "obstacle speed " << obstacle_speed << " exceeds declared bound eta = "
            << cfg.safeguard.eta << "; ";
    return why.str();
}

}  // namespace pe
