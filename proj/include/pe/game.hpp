#pragma once

#include <string>
#include <vector>

#include "pe/dynamics.hpp"
#include "pe/features.hpp"
#include "pe/linalg.hpp"

namespace pe {

// Zero-sum game bookkeeping: stage reward, value-equation residual
// diagnostics, attenuation-ratio accounting, and a Riccati solver for the
// linear special case used as a convergence oracle.

struct GameConfig {
    Mat4 Q = Mat4::identity();
    Mat2 R = Mat2::identity();
    Mat2 T = Mat2::identity();
    double gamma = 10.0;
};

double reward(const Vec4& xi, const Vec2& u_n, const Vec2& u_e, const GameConfig& cfg);

struct ResidualStats {
    double mean_abs = 0.0;
    double max_abs = 0.0;
};

struct StatePair {
    PursuerState zp;
    EvaderState ze;
};

// Residual of the stationary value equation at the given weights, evaluated
// over sample states. With quadratic features and exact game weights on the
// linear model the residual vanishes.
ResidualStats hji_residual(const Vec10& w, const std::vector<StatePair>& states,
                           const GameConfig& cfg, bool nonlinear);

// Running trapezoidal accumulation of both sides of the attenuation
// inequality: lhs integrates xi'Q xi + u_n'R u_n, rhs integrates
// gamma^2 u_e'T u_e.
struct L2Accounting {
    double lhs = 0.0;
    double rhs = 0.0;
    bool has_prev = false;
    double prev_lhs_integrand = 0.0;
    double prev_rhs_integrand = 0.0;

    void add_sample(double dt, double lhs_integrand, double rhs_integrand);
    double ratio() const;  // NaN when rhs == 0
};

struct GareSolution {
    Mat4 P;
    double residual = 0.0;
    int iterations = 0;
    bool ok = false;
    std::string error;
    std::vector<double> residual_history;
};

// Solves A'P + PA + Q - P Bp R^-1 Bp' P + (1/gamma^2) P Be T^-1 Be' P = 0
// by Newton iteration from a stabilizing initial guess; each iterate solves
// a Lyapunov equation.
GareSolution gare_solve(const Mat4& A, const Mat<4, 2>& Bp, const Mat<4, 2>& Be,
                        const GameConfig& cfg, int max_iter = 60, double tol = 1e-13);

// Linear relative dynamics of the planar scenario with the drift
// nonlinearity removed.
Mat4 double_integrator_A();
Mat<4, 2> velocity_channel_B();

// Feedback policies induced by a quadratic value xi'P xi.
Vec2 pursuit_policy_from_p(const Mat4& P, const Vec4& xi, const GameConfig& cfg);
Vec2 evasion_policy_from_p(const Mat4& P, const Vec4& xi, const GameConfig& cfg);

}  // namespace pe
