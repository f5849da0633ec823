#pragma once

#include <cmath>
#include <stdexcept>

#include "renyi_bvn/linalg.hpp"

// Bivariate-normal density, score and the closed-form per-(theta, alpha)
// blocks of the minimum Renyi pseudodistance estimator's asymptotic theory.
// Parameter order is (mu1, mu2, sigma1, sigma2, rho) throughout.

namespace renyi_bvn {

struct Theta {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;

    bool valid() const {
        return std::isfinite(mu1) && std::isfinite(mu2) && sigma1 > 0.0 && sigma2 > 0.0 &&
               std::isfinite(sigma1) && std::isfinite(sigma2) && std::fabs(rho) < 1.0;
    }
    void require_valid() const {
        if (!valid()) throw std::invalid_argument("Theta: need sigma1,sigma2 > 0 and |rho| < 1");
    }
    Vec5 as_vec() const { return {mu1, mu2, sigma1, sigma2, rho}; }
    static Theta from_vec(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
};

struct ModelBlocks {
    double alpha = 0.0;
    double kappa = 0.0;
    Vec5 c{};
    Mat5 J{};
    Mat5 S{};
    Mat5 K{};
    Mat5 V{};
};

// Normalizing constant k(theta) = 2*pi*sigma1*sigma2*sqrt(1-rho^2).
inline double norm_const(const Theta& t) {
    return 2.0 * 3.14159265358979323846 * t.sigma1 * t.sigma2 * std::sqrt(1.0 - t.rho * t.rho);
}

// Mahalanobis quadratic form d^2 = (xt^2 + yt^2 - 2 rho xt yt) / (1 - rho^2).
inline double mahalanobis_sq(const Theta& t, double x, double y) {
    const double xt = (x - t.mu1) / t.sigma1;
    const double yt = (y - t.mu2) / t.sigma2;
    return (xt * xt + yt * yt - 2.0 * t.rho * xt * yt) / (1.0 - t.rho * t.rho);
}

inline double density(const Theta& t, double x, double y) {
    t.require_valid();
    return std::exp(-0.5 * mahalanobis_sq(t, x, y)) / norm_const(t);
}

inline double log_density(const Theta& t, double x, double y) {
    t.require_valid();
    return -0.5 * mahalanobis_sq(t, x, y) - std::log(norm_const(t));
}

// w(x,y) = exp(d^2/2), so density * k(theta) * w == 1.
inline double weight(const Theta& t, double x, double y) {
    t.require_valid();
    return std::exp(0.5 * mahalanobis_sq(t, x, y));
}

// Score vector: gradient of log density in (mu1, mu2, sigma1, sigma2, rho).
inline Vec5 score(const Theta& t, double x, double y) {
    t.require_valid();
    const double xt = (x - t.mu1) / t.sigma1;
    const double yt = (y - t.mu2) / t.sigma2;
    const double r = t.rho;
    const double q = 1.0 - r * r;
    return {
        (xt - r * yt) / (t.sigma1 * q),
        (yt - r * xt) / (t.sigma2 * q),
        -1.0 / t.sigma1 - (r * xt * yt - xt * xt) / (t.sigma1 * q),
        -1.0 / t.sigma2 - (r * xt * yt - yt * yt) / (t.sigma2 * q),
        (r + xt * yt) / q - r * (xt * xt + yt * yt - 2.0 * r * xt * yt) / (q * q),
    };
}

inline double kappa_alpha(const Theta& t, double alpha) {
    return 1.0 / (std::pow(norm_const(t), alpha) * (alpha + 1.0));
}

// Objective weight w_alpha(theta) = kappa_alpha^(-alpha/(alpha+1)).
inline double objective_weight(const Theta& t, double alpha) {
    return std::pow(kappa_alpha(t, alpha), -alpha / (alpha + 1.0));
}

inline Vec5 c_alpha(const Theta& t, double alpha) {
    const double a = alpha / (alpha + 1.0);
    return {0.0, 0.0, -a / t.sigma1, -a / t.sigma2, a * t.rho / (1.0 - t.rho * t.rho)};
}

namespace detail {

inline void require_conditioned(const Theta& t) {
    t.require_valid();
    if (std::fabs(t.rho) > 1.0 - 1e-10)
        throw std::domain_error("model: |rho| too close to 1, blocks are ill-conditioned");
}

// 3x3 sigma/rho-block matrices on the standardized (rho-only) scale.
inline Mat3 s21_rho(double r) {
    const double q = 1.0 - r * r;
    return {{{(2.0 - r * r) / q, -r * r / q, -r / q},
             {-r * r / q, (2.0 - r * r) / q, -r / q},
             {-r / q, -r / q, (1.0 + r * r) / (q * q)}}};
}

inline Mat3 s22_rho(double r) {
    const double q = 1.0 - r * r;
    return {{{1.0, 1.0, -r / q},
             {1.0, 1.0, -r / q},
             {-r / q, -r / q, r * r / (q * q)}}};
}

inline Mat3 s21_rho_inv(double r) {
    const double q = 1.0 - r * r;
    return {{{0.5, 0.5 * r * r, 0.5 * r * q},
             {0.5 * r * r, 0.5, 0.5 * r * q},
             {0.5 * r * q, 0.5 * r * q, q * q}}};
}

inline Mat3 j2_rho(double r, double alpha) {
    const double q = 1.0 - r * r;
    const double a2 = alpha * alpha;
    const double d = a2 - r * r * (a2 + 1.0);
    return {{{(d + 2.0) / q, d / q, -r * (a2 + 1.0) / q},
             {d / q, (d + 2.0) / q, -r * (a2 + 1.0) / q},
             {-r * (a2 + 1.0) / q, -r * (a2 + 1.0) / q, (r * r * (a2 + 1.0) + 1.0) / (q * q)}}};
}

inline Mat3 k2_rho(double r, double alpha) {
    const Mat3 s21 = s21_rho(r), s22 = s22_rho(r);
    Mat3 out{};
    const double a1 = (alpha + 1.0) * (alpha + 1.0), a2 = alpha * alpha;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = a1 * s21[i][j] + a2 * s22[i][j];
    return out;
}

// V2(rho) = S21^-1 K2(rho) S21^-1 = (a+1)^2 S21^-1 + a^2 S21^-1 S22 S21^-1.
inline Mat3 v2_rho(double r, double alpha) {
    const Mat3 si = s21_rho_inv(r);
    const Mat3 mid = matmul(si, matmul(s22_rho(r), si));
    Mat3 out{};
    const double a1 = (alpha + 1.0) * (alpha + 1.0), a2 = alpha * alpha;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = a1 * si[i][j] + a2 * mid[i][j];
    return out;
}

// Conjugation by diag(d1, d2) resp. diag(d1, d2, 1), times a scalar.
inline void put_block2(Mat5& m, const Mat2& b, double scale, double d1, double d2) {
    const double d[2] = {d1, d2};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = scale * d[i] * b[i][j] * d[j];
}

inline void put_block3(Mat5& m, const Mat3& b, double scale, double d1, double d2) {
    const double d[3] = {d1, d2, 1.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[2 + i][2 + j] = scale * d[i] * b[i][j] * d[j];
}

}  // namespace detail

// All closed-form blocks at (theta, alpha).
inline ModelBlocks blocks(const Theta& t, double alpha) {
    detail::require_conditioned(t);
    if (alpha < 0.0) throw std::invalid_argument("blocks: alpha must be nonnegative");

    const double r = t.rho;
    const double q = 1.0 - r * r;
    const double k = norm_const(t);
    const double ka = std::pow(k, alpha);
    const double a1 = alpha + 1.0;
    const double b1 = 2.0 * alpha + 1.0;

    ModelBlocks mb;
    mb.alpha = alpha;
    mb.kappa = 1.0 / (ka * a1);
    mb.c = c_alpha(t, alpha);

    const Mat2 j1{{{1.0 / q, -r / q}, {-r / q, 1.0 / q}}};
    const Mat2 j1inv{{{1.0, r}, {r, 1.0}}};

    detail::put_block2(mb.J, j1, 1.0 / (ka * a1 * a1), 1.0 / t.sigma1, 1.0 / t.sigma2);
    detail::put_block3(mb.J, detail::j2_rho(r, alpha), 1.0 / (ka * a1 * a1 * a1), 1.0 / t.sigma1,
                       1.0 / t.sigma2);

    detail::put_block2(mb.S, j1, 1.0 / (ka * a1 * a1), 1.0 / t.sigma1, 1.0 / t.sigma2);
    detail::put_block3(mb.S, detail::s21_rho(r), 1.0 / (ka * a1 * a1 * a1), 1.0 / t.sigma1,
                       1.0 / t.sigma2);

    const double k2a = std::pow(k, 2.0 * alpha);
    detail::put_block2(mb.K, j1, 1.0 / (k2a * b1 * b1), 1.0 / t.sigma1, 1.0 / t.sigma2);
    detail::put_block3(mb.K, detail::k2_rho(r, alpha), 1.0 / (k2a * b1 * b1 * b1 * a1 * a1),
                       1.0 / t.sigma1, 1.0 / t.sigma2);

    const double a4 = a1 * a1 * a1 * a1;
    detail::put_block2(mb.V, j1inv, a4 / (b1 * b1), t.sigma1, t.sigma2);
    detail::put_block3(mb.V, detail::v2_rho(r, alpha), a4 / (b1 * b1 * b1), t.sigma1, t.sigma2);
    return mb;
}

// Blockwise explicit inverse of S_alpha.
inline Mat5 s_inverse(const Theta& t, double alpha) {
    detail::require_conditioned(t);
    const double r = t.rho;
    const double ka = std::pow(norm_const(t), alpha);
    const double a1 = alpha + 1.0;
    Mat5 out{};
    const Mat2 j1inv{{{1.0, r}, {r, 1.0}}};
    detail::put_block2(out, j1inv, ka * a1 * a1, t.sigma1, t.sigma2);
    detail::put_block3(out, detail::s21_rho_inv(r), ka * a1 * a1 * a1, t.sigma1, t.sigma2);
    return out;
}

}  // namespace renyi_bvn
