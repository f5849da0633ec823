#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace renyi_bvn {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Vec5 = std::array<double, 5>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;
using Mat5 = Mat<5>;

template <std::size_t N>
constexpr Mat<N> zeros() {
    Mat<N> m{};
    return m;
}

template <std::size_t N>
inline std::array<double, N> matvec(const Mat<N>& a, const std::array<double, N>& v) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i] += a[i][j] * v[j];
    return out;
}

template <std::size_t N>
inline Mat<N> matmul(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

template <std::size_t N>
inline double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double norm2(const std::array<double, N>& a) {
    return std::sqrt(dot(a, a));
}

// Gaussian elimination with partial pivoting; sized for the r x r (r <= 5)
// constraint blocks. Throws on (numerically) singular input.
template <std::size_t N>
inline std::array<double, N> solve(Mat<N> a, std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300)
            throw std::domain_error("linalg: singular matrix in solve()");
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < N; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t ii = N; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < N; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

template <std::size_t N>
inline Mat<N> inverse(const Mat<N>& a) {
    Mat<N> inv{};
    for (std::size_t col = 0; col < N; ++col) {
        std::array<double, N> e{};
        e[col] = 1.0;
        const auto x = solve(a, e);
        for (std::size_t r = 0; r < N; ++r) inv[r][col] = x[r];
    }
    return inv;
}

}  // namespace renyi_bvn
