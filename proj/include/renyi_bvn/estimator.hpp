#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "renyi_bvn/model.hpp"
#include "renyi_bvn/sample.hpp"

namespace renyi_bvn {

struct degenerate_sample : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Working parametrization of the fit: zeta_j^2 = sigma_j^2 / (alpha + 1).
struct ReparamTheta {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double zeta1_sq = 1.0;
    double zeta2_sq = 1.0;
    double rho = 0.0;
};

struct EstimateTrace {
    double alpha = 0.0;
    Theta theta_hat;
    ReparamTheta vartheta_hat;
    std::vector<double> weights;
    int inner_iterations = 0;
    bool converged = true;
    bool rho_clamped = false;
    double objective = 0.0;
    double eq_residual_norm = 0.0;
};

inline constexpr double kRhoClampMargin = 1e-9;

// Maximum-likelihood fit: 1/n moments and the Pearson correlation.
inline Theta mle(const PairedSample& s) {
    const std::size_t n = s.n();
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += s.xs[i];
        m2 += s.ys[i];
    }
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    double v1 = 0.0, v2 = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = s.xs[i] - m1;
        const double dy = s.ys[i] - m2;
        v1 += dx * dx;
        v2 += dy * dy;
        cov += dx * dy;
    }
    v1 /= static_cast<double>(n);
    v2 /= static_cast<double>(n);
    cov /= static_cast<double>(n);
    if (v1 <= 0.0 || v2 <= 0.0)
        throw degenerate_sample("mle: a coordinate is constant");
    const double s1 = std::sqrt(v1);
    const double s2 = std::sqrt(v2);
    const double r = cov / (s1 * s2);
    if (std::fabs(r) >= 1.0 - 1e-13)
        throw degenerate_sample("mle: sample is collinear (|rho| = 1)");
    return {m1, m2, s1, s2, r};
}

// Sum_i w_alpha(theta) f_theta^alpha(X_i); log-likelihood at alpha = 0.
inline double objective(const PairedSample& s, const Theta& t, double alpha) {
    t.require_valid();
    if (alpha == 0.0) {
        double ll = 0.0;
        for (std::size_t i = 0; i < s.n(); ++i) ll += log_density(t, s.xs[i], s.ys[i]);
        return ll;
    }
    const double wa = objective_weight(t, alpha);
    const double log_k = std::log(norm_const(t));
    double acc = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i)
        acc += std::exp(-alpha * (0.5 * mahalanobis_sq(t, s.xs[i], s.ys[i]) + log_k));
    return wa * acc;
}

// || sum_i w_i^-alpha (u(X_i) - c_alpha) ||_2 / n.
inline double eq_residual(const PairedSample& s, const Theta& t, double alpha) {
    t.require_valid();
    const Vec5 c = c_alpha(t, alpha);
    Vec5 acc{};
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double wi = std::exp(-alpha * 0.5 * mahalanobis_sq(t, s.xs[i], s.ys[i]));
        const Vec5 u = score(t, s.xs[i], s.ys[i]);
        for (int j = 0; j < 5; ++j) acc[j] += wi * (u[j] - c[j]);
    }
    return norm2(acc) / static_cast<double>(s.n());
}

namespace detail {

inline Theta theta_from_reparam(const ReparamTheta& v, double alpha) {
    return {v.mu1, v.mu2, std::sqrt((alpha + 1.0) * v.zeta1_sq),
            std::sqrt((alpha + 1.0) * v.zeta2_sq), v.rho};
}

inline std::vector<double> irm_weights(const PairedSample& s, const ReparamTheta& v,
                                       double alpha) {
    const std::size_t n = s.n();
    std::vector<double> w(n);
    const double z1 = std::sqrt(v.zeta1_sq);
    const double z2 = std::sqrt(v.zeta2_sq);
    const double q = 1.0 - v.rho * v.rho;
    const double a = alpha / (alpha + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xt = (s.xs[i] - v.mu1) / z1;
        const double yt = (s.ys[i] - v.mu2) / z2;
        const double d2 = (xt * xt + yt * yt - 2.0 * v.rho * xt * yt) / q;
        w[i] = std::exp(-a * 0.5 * d2);
    }
    return w;
}

struct InnerResult {
    ReparamTheta vartheta;
    std::vector<double> weights;
    int iterations = 0;
    bool converged = false;
    bool rho_clamped = false;
};

// One reweighted-moments pass per iteration until the parameter step falls
// below xi in Euclidean norm.
inline InnerResult irm_inner(const PairedSample& s, double alpha, ReparamTheta v, double xi,
                             int max_inner) {
    const std::size_t n = s.n();
    InnerResult res;
    std::vector<double> w;
    for (int it = 1; it <= max_inner; ++it) {
        w = irm_weights(s, v, alpha);
        double t = 0.0;
        for (double wi : w) t += wi;
        if (t < static_cast<double>(n) * 1e-12)
            throw degenerate_sample("irm: weights collapsed to zero");
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m1 += w[i] * s.xs[i];
            m2 += w[i] * s.ys[i];
        }
        m1 /= t;
        m2 /= t;
        double z1 = 0.0, z2 = 0.0, cz = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = s.xs[i] - m1;
            const double dy = s.ys[i] - m2;
            z1 += w[i] * dx * dx;
            z2 += w[i] * dy * dy;
            cz += w[i] * dx * dy;
        }
        z1 /= t;
        z2 /= t;
        cz /= t;
        if (z1 <= 0.0 || z2 <= 0.0)
            throw degenerate_sample("irm: weighted variance collapsed to zero");
        double r = cz / std::sqrt(z1 * z2);
        bool clamped = false;
        if (r > 1.0 - kRhoClampMargin) {
            r = 1.0 - kRhoClampMargin;
            clamped = true;
        } else if (r < -1.0 + kRhoClampMargin) {
            r = -1.0 + kRhoClampMargin;
            clamped = true;
        }
        const ReparamTheta next{m1, m2, z1, z2, r};
        const double step = std::sqrt(
            (next.mu1 - v.mu1) * (next.mu1 - v.mu1) + (next.mu2 - v.mu2) * (next.mu2 - v.mu2) +
            (next.zeta1_sq - v.zeta1_sq) * (next.zeta1_sq - v.zeta1_sq) +
            (next.zeta2_sq - v.zeta2_sq) * (next.zeta2_sq - v.zeta2_sq) +
            (next.rho - v.rho) * (next.rho - v.rho));
        v = next;
        res.iterations = it;
        res.rho_clamped = res.rho_clamped || clamped;
        if (step < xi) {
            res.converged = true;
            break;
        }
    }
    res.vartheta = v;
    res.weights = irm_weights(s, v, alpha);
    return res;
}

inline EstimateTrace make_trace(const PairedSample& s, double alpha, const InnerResult& inner) {
    EstimateTrace tr;
    tr.alpha = alpha;
    tr.vartheta_hat = inner.vartheta;
    tr.theta_hat = theta_from_reparam(inner.vartheta, alpha);
    tr.weights = inner.weights;
    tr.inner_iterations = inner.iterations;
    tr.converged = inner.converged;
    tr.rho_clamped = inner.rho_clamped;
    tr.objective = objective(s, tr.theta_hat, alpha);
    tr.eq_residual_norm = eq_residual(s, tr.theta_hat, alpha);
    return tr;
}

inline EstimateTrace mle_trace(const PairedSample& s) {
    const Theta t = mle(s);
    EstimateTrace tr;
    tr.alpha = 0.0;
    tr.theta_hat = t;
    tr.vartheta_hat = {t.mu1, t.mu2, t.sigma1 * t.sigma1, t.sigma2 * t.sigma2, t.rho};
    tr.weights.assign(s.n(), 1.0);
    tr.inner_iterations = 0;
    tr.converged = true;
    tr.objective = objective(s, t, 0.0);
    tr.eq_residual_norm = eq_residual(s, t, 0.0);
    return tr;
}

}  // namespace detail

// Warm-started fits over the grid alpha_k = k / grid_K, k = 0..grid_K. The
// first entry is exactly the maximum-likelihood fit.
inline std::vector<EstimateTrace> irm_fit(const PairedSample& s, int grid_K = 20,
                                          double xi = 1e-8, int max_inner = 500) {
    if (grid_K < 1) throw std::invalid_argument("irm_fit: grid_K must be >= 1");
    if (!(xi > 0.0)) throw std::invalid_argument("irm_fit: xi must be positive");
    if (max_inner < 1) throw std::invalid_argument("irm_fit: max_inner must be >= 1");
    std::vector<EstimateTrace> out;
    out.reserve(static_cast<std::size_t>(grid_K) + 1);
    out.push_back(detail::mle_trace(s));
    ReparamTheta state = out.front().vartheta_hat;
    for (int k = 1; k <= grid_K; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(grid_K);
        const auto inner = detail::irm_inner(s, alpha, state, xi, max_inner);
        state = inner.vartheta;
        out.push_back(detail::make_trace(s, alpha, inner));
    }
    return out;
}

// Fit at one alpha: walk the warm-start chain through the grid points below
// alpha, then finish with an inner loop at alpha itself.
inline EstimateTrace fit_alpha(const PairedSample& s, double alpha, int grid_K = 20,
                               double xi = 1e-8, int max_inner = 500) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("fit_alpha: alpha must be finite and >= 0");
    if (grid_K < 1) throw std::invalid_argument("fit_alpha: grid_K must be >= 1");
    if (alpha == 0.0) return detail::mle_trace(s);
    ReparamTheta state = detail::mle_trace(s).vartheta_hat;
    const int k_below = std::min(
        grid_K, static_cast<int>(std::floor(alpha * static_cast<double>(grid_K) + 1e-12)));
    detail::InnerResult inner;
    for (int k = 1; k <= k_below; ++k) {
        const double ak = static_cast<double>(k) / static_cast<double>(grid_K);
        inner = detail::irm_inner(s, ak, state, xi, max_inner);
        state = inner.vartheta;
    }
    const double a_below = static_cast<double>(k_below) / static_cast<double>(grid_K);
    if (k_below == 0 || std::fabs(a_below - alpha) > 1e-12)
        inner = detail::irm_inner(s, alpha, state, xi, max_inner);
    return detail::make_trace(s, alpha, inner);
}

}  // namespace renyi_bvn
