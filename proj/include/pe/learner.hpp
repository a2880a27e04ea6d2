#pragma once

#include <cstddef>
#include <vector>

#include "pe/dynamics.hpp"
#include "pe/features.hpp"
#include "pe/game.hpp"
#include "pe/linalg.hpp"
#include "pe/rng.hpp"

namespace pe {

// Online actor / perturber / critic learner on the quadratic feature basis.
// The learning signal combines the Bellman residual at the measured state
// with residuals at model-simulated states sampled around it, which is what
// relaxes the classical excitation requirement. Per-sample quantities are
// independent pure computations; they are evaluated either serially or with
// OpenMP into pre-allocated slots and always reduced in index order, so both
// paths produce bitwise-identical results.

struct LearnerConfig {
    double kc1 = 1.0;
    double kc2 = 10.0;
    double ka1 = 10.0;
    double ka2 = 0.1;
    double kp1 = 10.0;
    double kp2 = 0.1;
    double beta = 0.1;        // forgetting factor of the gain matrix
    int sample_count = 30;    // N
    double w_bar = 100.0;     // projection radius for actor/perturber weights
    double gamma0 = 100.0;    // Gamma(0) = gamma0 * I
    double gamma_lo = 1e-3;   // spectral clamp of Gamma
    double gamma_hi = 1e4;
    double box_halfwidth = 2.0;  // sampling box half-width per coordinate
    double lambda_c = 1e-6;      // excitation threshold
    bool parallel_batch = true;
    Vec10 wc0;
    Vec10 wa0;
    Vec10 wp0;
};

struct LearnerState {
    Vec10 wc;
    Vec10 wa;
    Vec10 wp;
    Mat10 gamma;
};

LearnerState learner_init(const LearnerConfig& cfg);

Vec2 actor_policy(const PursuerState& zp, const Vec4& xi, const Vec10& wa,
                  const GameConfig& game);
Vec2 perturber_policy(const EvaderState& ze, const Vec4& xi, const Vec10& wp,
                      const GameConfig& game);

// Bellman residual and its regressor at one (relative) state.
struct BellmanEval {
    Vec10 phi;         // d(features)/dt under the current policies
    double rho = 1.0;  // 1 + phi.phi
    double delta = 0.0;
    double reward = 0.0;
};

BellmanEval bellman_error(const Vec4& xi, const PursuerState& zp, const EvaderState& ze,
                          const LearnerState& st, const GameConfig& game, bool nonlinear);

struct SamplePoint {
    Vec4 zp;
    Vec4 ze;
    Vec4 xi;
};

struct SampleEval {
    Vec10 phi;
    double rho = 1.0;
    double reward = 0.0;
    double delta = 0.0;
    Vec10 g_wa;  // (Phi gp R^-1 gp' Phi') wa, actor correction direction
    Vec10 h_wp;  // (Phi ge T^-1 ge' Phi') wp, perturber correction direction
};

struct SampleBatch {
    std::vector<SamplePoint> points;
    std::vector<SampleEval> evals;
    std::size_t size() const { return points.size(); }
};

// Uniform box sampling around the current pair of states. Throws
// std::invalid_argument for sample_count < 1.
SampleBatch sample_batch(const PursuerState& zp, const EvaderState& ze, int sample_count,
                         double box_halfwidth, Rng& rng);

// Fills `evals`; serial reference implementation.
void evaluate_batch_serial(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                           bool nonlinear);

// Same contract, OpenMP over samples. Results are bitwise identical to the
// serial path for any thread count.
void evaluate_batch_parallel(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                             bool nonlinear);

void evaluate_batch(SampleBatch& batch, const LearnerState& st, const GameConfig& game,
                    bool nonlinear, bool parallel);

// Normalized regressor outer product of one evaluation; eigenvalues lie in
// [0, 1/4].
Mat10 normalized_outer(const SampleEval& ev);

// Euler step of the critic weights and gain matrix. Returns false when the
// update produced non-finite values.
bool critic_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch, double dt,
                   const LearnerConfig& cfg);

bool actor_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch, double dt,
                  const LearnerConfig& cfg, const GameConfig& game, const Vec4& xi,
                  const PursuerState& zp);

bool perturber_update(LearnerState& st, const BellmanEval& rt, const SampleBatch& batch,
                      double dt, const LearnerConfig& cfg, const GameConfig& game, const Vec4& xi,
                      const EvaderState& ze);

struct ExcitationReport {
    double min_eig = 0.0;
    bool passes = false;
};

ExcitationReport excitation_monitor(const SampleBatch& batch, double lambda_c);

}  // namespace pe
