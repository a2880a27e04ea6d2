#pragma once

#include <array>
#include <cstddef>
#include <utility>

#include "pe/linalg.hpp"

namespace pe {

// Symmetric-reduced quadratic feature basis on the 4-dimensional relative
// state: the four squares first, then the six cross monomials. A quadratic
// form xi^T P xi maps onto this basis with weight P_ii on the squares and
// 2 P_ij on the cross terms.

inline constexpr std::size_t kStateDim = 4;
inline constexpr std::size_t kFeatureDim = 10;

using Vec10 = Vec<kFeatureDim>;
using Mat10 = Mat<kFeatureDim, kFeatureDim>;
using FeatureJacobian = Mat<kFeatureDim, kStateDim>;

inline constexpr std::array<std::pair<std::size_t, std::size_t>, kFeatureDim> kMonomialPairs = {
    {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline Vec10 features(const Vec4& xi) {
    Vec10 th;
    for (std::size_t k = 0; k < kFeatureDim; ++k)
        th[k] = xi[kMonomialPairs[k].first] * xi[kMonomialPairs[k].second];
    return th;
}

// Row k holds the gradient of the k-th monomial.
inline FeatureJacobian feature_jacobian(const Vec4& xi) {
    FeatureJacobian g;
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
        const auto [i, j] = kMonomialPairs[k];
        g(k, i) += xi[j];
        g(k, j) += xi[i];
    }
    return g;
}

// grad V(xi) for V = W . features(xi).
inline Vec4 value_gradient(const Vec4& xi, const Vec10& w) {
    return transpose(feature_jacobian(xi)) * w;
}

inline Vec10 weights_from_quadratic(const Mat4& p) {
    Vec10 w;
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
        const auto [i, j] = kMonomialPairs[k];
        w[k] = (i == j) ? p(i, j) : 2.0 * p(i, j);
    }
    return w;
}

}  // namespace pe
