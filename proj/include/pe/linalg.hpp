#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace pe {

// Small fixed-size dense vectors/matrices. Everything is double, row-major,
// value semantics. Sized for this project (state dim 4, feature dim 10),
// not a general-purpose library.

template <std::size_t N>
struct Vec {
    std::array<double, N> a{};

    constexpr Vec() = default;
    template <class... Ts>
        requires(sizeof...(Ts) == N)
    constexpr Vec(Ts... xs) : a{static_cast<double>(xs)...} {}

    constexpr double& operator[](std::size_t i) { return a[i]; }
    constexpr const double& operator[](std::size_t i) const { return a[i]; }
    static constexpr std::size_t size() { return N; }
};

using Vec2 = Vec<2>;
using Vec4 = Vec<4>;

template <std::size_t N>
constexpr Vec<N> operator+(const Vec<N>& x, const Vec<N>& y) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = x[i] + y[i];
    return r;
}

template <std::size_t N>
constexpr Vec<N> operator-(const Vec<N>& x, const Vec<N>& y) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = x[i] - y[i];
    return r;
}

template <std::size_t N>
constexpr Vec<N> operator-(const Vec<N>& x) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = -x[i];
    return r;
}

template <std::size_t N>
constexpr Vec<N> operator*(double s, const Vec<N>& x) {
    Vec<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = s * x[i];
    return r;
}

template <std::size_t N>
constexpr Vec<N> operator*(const Vec<N>& x, double s) {
    return s * x;
}

template <std::size_t N>
constexpr Vec<N>& operator+=(Vec<N>& x, const Vec<N>& y) {
    for (std::size_t i = 0; i < N; ++i) x[i] += y[i];
    return x;
}

template <std::size_t N>
constexpr Vec<N>& operator-=(Vec<N>& x, const Vec<N>& y) {
    for (std::size_t i = 0; i < N; ++i) x[i] -= y[i];
    return x;
}

template <std::size_t N>
constexpr double dot(const Vec<N>& x, const Vec<N>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += x[i] * y[i];
    return s;
}

template <std::size_t N>
double norm(const Vec<N>& x) {
    return std::sqrt(dot(x, x));
}

template <std::size_t N>
double inf_norm(const Vec<N>& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

template <std::size_t N>
bool all_finite(const Vec<N>& x) {
    for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

template <std::size_t R, std::size_t C>
struct Mat {
    std::array<double, R * C> a{};

    constexpr double& operator()(std::size_t i, std::size_t j) { return a[i * C + j]; }
    constexpr const double& operator()(std::size_t i, std::size_t j) const { return a[i * C + j]; }
    static constexpr std::size_t rows() { return R; }
    static constexpr std::size_t cols() { return C; }

    static constexpr Mat identity()
        requires(R == C)
    {
        Mat m;
        for (std::size_t i = 0; i < R; ++i) m(i, i) = 1.0;
        return m;
    }
};

using Mat2 = Mat<2, 2>;
using Mat4 = Mat<4, 4>;

template <std::size_t R, std::size_t C>
constexpr Mat<R, C> operator+(const Mat<R, C>& x, const Mat<R, C>& y) {
    Mat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

template <std::size_t R, std::size_t C>
constexpr Mat<R, C> operator-(const Mat<R, C>& x, const Mat<R, C>& y) {
    Mat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

template <std::size_t R, std::size_t C>
constexpr Mat<R, C> operator*(double s, const Mat<R, C>& x) {
    Mat<R, C> r;
    for (std::size_t i = 0; i < R * C; ++i) r.a[i] = s * x.a[i];
    return r;
}

template <std::size_t R, std::size_t C>
constexpr Mat<R, C>& operator+=(Mat<R, C>& x, const Mat<R, C>& y) {
    for (std::size_t i = 0; i < R * C; ++i) x.a[i] += y.a[i];
    return x;
}

template <std::size_t R, std::size_t C>
constexpr Vec<R> operator*(const Mat<R, C>& m, const Vec<C>& v) {
    Vec<R> r;
    for (std::size_t i = 0; i < R; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < C; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

template <std::size_t R, std::size_t K, std::size_t C>
constexpr Mat<R, C> operator*(const Mat<R, K>& x, const Mat<K, C>& y) {
    Mat<R, C> r;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t k = 0; k < K; ++k) {
            const double xik = x(i, k);
            for (std::size_t j = 0; j < C; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

template <std::size_t R, std::size_t C>
constexpr Mat<C, R> transpose(const Mat<R, C>& m) {
    Mat<C, R> r;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) r(j, i) = m(i, j);
    return r;
}

template <std::size_t N>
constexpr Mat<N, N> outer(const Vec<N>& x, const Vec<N>& y) {
    Mat<N, N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = x[i] * y[j];
    return r;
}

template <std::size_t N>
constexpr double quad_form(const Mat<N, N>& m, const Vec<N>& v) {
    return dot(v, m * v);
}

template <std::size_t R, std::size_t C>
double frobenius_norm(const Mat<R, C>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < R * C; ++i) s += m.a[i] * m.a[i];
    return std::sqrt(s);
}

template <std::size_t N>
constexpr Mat<N, N> symmetrize(const Mat<N, N>& m) {
    Mat<N, N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = 0.5 * (m(i, j) + m(j, i));
    return r;
}

template <std::size_t R, std::size_t C>
bool all_finite(const Mat<R, C>& m) {
    for (std::size_t i = 0; i < R * C; ++i)
        if (!std::isfinite(m.a[i])) return false;
    return true;
}

// Solves m x = b by Gaussian elimination with partial pivoting.
// Returns false when the matrix is numerically singular.
template <std::size_t N>
bool solve_linear(Mat<N, N> m, Vec<N> b, Vec<N>& x) {
    std::array<std::size_t, N> perm{};
    for (std::size_t i = 0; i < N; ++i) perm[i] = i;

    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < N; ++r) {
            const double v = std::abs(m(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) return false;
        if (piv != col) {
            for (std::size_t j = 0; j < N; ++j) std::swap(m(col, j), m(piv, j));
            std::swap(b[col], b[piv]);
        }
        const double d = m(col, col);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = m(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < N; ++j) m(r, j) -= f * m(col, j);
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < N; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return true;
}

template <std::size_t N>
bool invert(const Mat<N, N>& m, Mat<N, N>& inv) {
    for (std::size_t j = 0; j < N; ++j) {
        Vec<N> e;
        e[j] = 1.0;
        Vec<N> col;
        if (!solve_linear(m, e, col)) return false;
        for (std::size_t i = 0; i < N; ++i) inv(i, j) = col[i];
    }
    return true;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
// On return `vecs` holds eigenvectors in columns: m = vecs * diag(vals) * vecs^T.
template <std::size_t N>
void jacobi_eigensym(Mat<N, N> m, Vec<N>& vals, Mat<N, N>& vecs) {
    vecs = Mat<N, N>::identity();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * vkq;
                    vecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    for (std::size_t i = 0; i < N; ++i) vals[i] = m(i, i);
}

template <std::size_t N>
double min_eigenvalue_sym(const Mat<N, N>& m) {
    Vec<N> vals;
    Mat<N, N> vecs;
    jacobi_eigensym(m, vals, vecs);
    double mn = vals[0];
    for (std::size_t i = 1; i < N; ++i) mn = std::min(mn, vals[i]);
    return mn;
}

// Gershgorin interval containing every eigenvalue of a symmetric matrix.
template <std::size_t N>
void gershgorin_bounds(const Mat<N, N>& m, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t i = 0; i < N; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < N; ++j)
            if (j != i) r += std::abs(m(i, j));
        lo = std::min(lo, m(i, i) - r);
        hi = std::max(hi, m(i, i) + r);
    }
}

// Projects a symmetric matrix onto { lo*I <= M <= hi*I } by clamping its
// eigenvalues. Skips the eigendecomposition when Gershgorin bounds already
// certify containment.
template <std::size_t N>
void clamp_spectrum(Mat<N, N>& m, double lo, double hi) {
    m = symmetrize(m);
    double glo, ghi;
    gershgorin_bounds(m, glo, ghi);
    if (glo >= lo && ghi <= hi) return;
    Vec<N> vals;
    Mat<N, N> vecs;
    jacobi_eigensym(m, vals, vecs);
    for (std::size_t i = 0; i < N; ++i) vals[i] = std::min(hi, std::max(lo, vals[i]));
    Mat<N, N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < N; ++k) s += vecs(i, k) * vals[k] * vecs(j, k);
            r(i, j) = s;
        }
    m = symmetrize(r);
}

}  // namespace pe
