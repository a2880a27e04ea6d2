#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pe/linalg.hpp"

namespace pe {

// Newton (Kleinman) solver for the game algebraic Riccati equation
//   A'P + PA + Q - P S P = 0,   S = Bp R^-1 Bp' - (1/gamma^2) Be T^-1 Be'.
// Each iterate solves a Lyapunov equation through the vectorized N^2 x N^2
// linear system; fine for the small sizes used here.

// Solves Acl' P + P Acl = -W. Returns false when the Lyapunov operator is
// singular (eigenvalue pair summing to zero).
template <std::size_t N>
bool solve_lyapunov(const Mat<N, N>& acl, const Mat<N, N>& w, Mat<N, N>& p) {
    constexpr std::size_t M = N * N;
    Mat<M, M> op;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const std::size_t row = i * N + j;
            for (std::size_t k = 0; k < N; ++k) {
                op(row, k * N + j) += acl(k, i);
                op(row, i * N + k) += acl(k, j);
            }
        }
    Vec<M> rhs;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) rhs[i * N + j] = -w(i, j);
    Vec<M> sol;
    if (!solve_linear(op, rhs, sol)) return false;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) p(i, j) = sol[i * N + j];
    p = symmetrize(p);
    return true;
}

// Lyapunov-based Hurwitz test: solvable with a positive definite solution.
template <std::size_t N>
bool is_hurwitz(const Mat<N, N>& a) {
    Mat<N, N> x;
    if (!solve_lyapunov(a, Mat<N, N>::identity(), x)) return false;
    return min_eigenvalue_sym(x) > 0.0;
}

template <std::size_t N>
struct RiccatiResult {
    Mat<N, N> P;
    double residual = 0.0;
    int iterations = 0;
    bool ok = false;
    std::string error;
    std::vector<double> residual_history;
};

template <std::size_t N>
double riccati_residual(const Mat<N, N>& a, const Mat<N, N>& q, const Mat<N, N>& s,
                        const Mat<N, N>& p) {
    const Mat<N, N> r = transpose(a) * p + p * a + q - p * (s * p);
    return frobenius_norm(r);
}

template <std::size_t N>
std::vector<Mat<N, N>> stabilizing_candidates() {
    std::vector<Mat<N, N>> cands;
    cands.push_back(Mat<N, N>{});  // works when A itself is Hurwitz
    if constexpr (N % 2 == 0) {
        // position/velocity coupled pattern for double-integrator chains
        for (double scale : {1.0, 5.0, 25.0}) {
            Mat<N, N> m;
            constexpr std::size_t H = N / 2;
            for (std::size_t i = 0; i < H; ++i) {
                m(i, i) = 2.0 * scale;
                m(H + i, H + i) = 2.0 * scale;
                m(i, H + i) = scale;
                m(H + i, i) = scale;
            }
            cands.push_back(m);
        }
    }
    for (double scale : {1.0, 10.0, 100.0}) cands.push_back(scale * Mat<N, N>::identity());
    return cands;
}

template <std::size_t N, std::size_t MP, std::size_t ME>
RiccatiResult<N> riccati_game_solve(const Mat<N, N>& a, const Mat<N, MP>& bp,
                                    const Mat<N, ME>& be, const Mat<N, N>& q,
                                    const Mat<MP, MP>& r, const Mat<ME, ME>& t, double gamma,
                                    int max_iter = 60, double tol = 1e-13) {
    RiccatiResult<N> out;

    Mat<MP, MP> r_inv;
    Mat<ME, ME> t_inv;
    if (!invert(r, r_inv) || !invert(t, t_inv)) {
        out.error = "singular cost weight";
        return out;
    }
    const Mat<N, N> s = bp * (r_inv * transpose(bp)) +
                        (-1.0 / (gamma * gamma)) * (be * (t_inv * transpose(be)));

    Mat<N, N> p;
    bool found = false;
    for (const auto& cand : stabilizing_candidates<N>()) {
        if (is_hurwitz(a - s * cand)) {
            p = cand;
            found = true;
            break;
        }
    }
    if (!found) {
        out.error = "no stabilizing initial guess (pair may not be stabilizable)";
        return out;
    }

    double res = riccati_residual(a, q, s, p);
    out.residual_history.push_back(res);
    const double res0 = std::max(res, 1.0);
    for (int it = 0; it < max_iter; ++it) {
        const Mat<N, N> acl = a - s * p;
        if (!is_hurwitz(acl)) {
            out.error = "iterate lost stability (attenuation level too small?)";
            return out;
        }
        Mat<N, N> next;
        if (!solve_lyapunov(acl, q + p * (s * p), next)) {
            out.error = "singular Lyapunov operator";
            return out;
        }
        p = next;
        res = riccati_residual(a, q, s, p);
        out.residual_history.push_back(res);
        out.iterations = it + 1;
        if (res > 1e6 * res0) {
            out.error = "Newton iteration diverged";
            return out;
        }
        if (res < tol * std::max(1.0, frobenius_norm(p))) break;
    }
    out.P = p;
    out.residual = res;
    out.ok = res < 1e-8 * std::max(1.0, frobenius_norm(p));
    if (!out.ok) out.error = "did not converge to tolerance";
    return out;
}

}  // namespace pe
