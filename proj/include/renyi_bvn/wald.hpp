#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "renyi_bvn/estimator.hpp"
#include "renyi_bvn/model.hpp"
#include "renyi_bvn/sample.hpp"
#include "renyi_bvn/special.hpp"

namespace renyi_bvn {

enum class Sided { two, greater, less };

enum class CaseKind {
    means,
    variances,
    correlation,
    means_and_variances,
    covariance,
    fixed_means,
    var_cov,
    morgan_pitman,
    paired_t,
    classic_rao,
    modified_wprime,
    corr_exact,
};

struct TestSpec {
    CaseKind kind = CaseKind::means;
    double rho0 = 0.0;
    double sigma12_0 = 0.0;
    double mu1_0 = 0.0;
    double mu2_0 = 0.0;
    double sigma1_0 = 1.0;
    double sigma2_0 = 1.0;
    Sided sided = Sided::two;
    double level = 0.05;
};

struct TestResult {
    double statistic = 0.0;
    std::string dist;
    double df = 0.0;
    double p_value = 1.0;
    bool reject_at_level = false;
    Theta theta_used;
    double alpha = 0.0;
    std::string warning;
};

// General restriction m(theta) = 0 with Jacobian columns M[j] = d m_j / d theta.
struct Constraint {
    int r = 1;
    std::function<std::vector<double>(const Theta&)> m_eval;
    std::function<std::vector<Vec5>(const Theta&)> M_eval;
};

inline const char* case_name(CaseKind k) {
    switch (k) {
        case CaseKind::means: return "means";
        case CaseKind::variances: return "variances";
        case CaseKind::correlation: return "correlation";
        case CaseKind::means_and_variances: return "means_and_variances";
        case CaseKind::covariance: return "covariance";
        case CaseKind::fixed_means: return "fixed_means";
        case CaseKind::var_cov: return "var_cov";
        case CaseKind::morgan_pitman: return "morgan_pitman";
        case CaseKind::paired_t: return "paired_t";
        case CaseKind::classic_rao: return "classic_rao";
        case CaseKind::modified_wprime: return "modified_wprime";
        case CaseKind::corr_exact: return "corr_exact";
    }
    return "?";
}

inline CaseKind case_from_name(const std::string& s) {
    for (CaseKind k :
         {CaseKind::means, CaseKind::variances, CaseKind::correlation,
          CaseKind::means_and_variances, CaseKind::covariance, CaseKind::fixed_means,
          CaseKind::var_cov, CaseKind::morgan_pitman, CaseKind::paired_t, CaseKind::classic_rao,
          CaseKind::modified_wprime, CaseKind::corr_exact})
        if (s == case_name(k)) return k;
    throw std::invalid_argument("unknown test case: " + s);
}

namespace detail {

inline void require_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("level must lie strictly between 0 and 1");
}

inline std::vector<double> solve_small(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::fabs(a[i][col]) > std::fabs(a[piv][col])) piv = i;
        if (a[piv][col] == 0.0) throw std::domain_error("wald: singular M' V M");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a[i][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
            b[i] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

inline TestResult chi_square_result(double w, int r, double level, const Theta& th, double alpha,
                                    std::string warning = {}) {
    require_level(level);
    TestResult res;
    res.statistic = w;
    res.dist = "chi_square";
    res.df = static_cast<double>(r);
    res.theta_used = th;
    res.alpha = alpha;
    res.warning = std::move(warning);
    if (std::isinf(w)) {
        res.p_value = 0.0;
        res.reject_at_level = true;
        return res;
    }
    res.p_value = chi2_sf(w, static_cast<double>(r));
    res.reject_at_level = w > chi2_upper_quantile(level, static_cast<double>(r));
    return res;
}

inline TestResult signed_result(double stat, DistRef::Kind kind, double df, Sided sided,
                                double level, const Theta& th, double alpha) {
    require_level(level);
    const DistRef dist{kind, df};
    TestResult res;
    res.statistic = stat;
    res.dist = dist.name();
    res.df = (kind == DistRef::Kind::std_normal) ? 0.0 : df;
    res.theta_used = th;
    res.alpha = alpha;
    switch (sided) {
        case Sided::two:
            res.p_value = 2.0 * dist.sf(std::fabs(stat));
            res.reject_at_level = std::fabs(stat) > dist.upper_quantile(level / 2.0);
            break;
        case Sided::greater:
            res.p_value = dist.sf(stat);
            res.reject_at_level = stat > dist.upper_quantile(level);
            break;
        case Sided::less:
            res.p_value = dist.sf(-stat);
            res.reject_at_level = stat < -dist.upper_quantile(level);
            break;
    }
    if (res.p_value > 1.0) res.p_value = 1.0;
    return res;
}

inline void require_two_sided(Sided sided, const char* what) {
    if (sided != Sided::two)
        throw std::invalid_argument(std::string(what) +
                                    ": one-sided alternatives exist only for z/t statistics");
}

constexpr const char* kBoundaryWarning =
    "correlation estimate clamped at the boundary; statistic set to +inf";

}  // namespace detail

// ---------------------------------------------------------------------------
// Statistics as closed-form functions of a fitted theta.
// ---------------------------------------------------------------------------

inline double wald_statistic(const Theta& th, std::size_t n, double alpha, const Constraint& c) {
    if (c.r < 1) throw std::invalid_argument("wald_statistic: constraint rank must be >= 1");
    const Mat5 v = blocks(th, alpha).V;
    const std::vector<double> m = c.m_eval(th);
    const std::vector<Vec5> cols = c.M_eval(th);
    if (static_cast<int>(m.size()) != c.r || static_cast<int>(cols.size()) != c.r)
        throw std::invalid_argument("wald_statistic: constraint evaluator size mismatch");
    std::vector<std::vector<double>> mvm(c.r, std::vector<double>(c.r, 0.0));
    for (int i = 0; i < c.r; ++i) {
        const Vec5 vmi = matvec(v, cols[i]);
        for (int j = 0; j < c.r; ++j) mvm[i][j] = dot(cols[j], vmi);
    }
    const std::vector<double> x = detail::solve_small(std::move(mvm), m);
    double quad = 0.0;
    for (int i = 0; i < c.r; ++i) quad += m[i] * x[i];
    return static_cast<double>(n) * quad;
}

// beta_alpha(sigma1, sigma2, rho) appearing in the equal-variances statistic.
inline double beta_alpha(double alpha, double s1, double s2, double r) {
    const double a = alpha / (alpha + 1.0);
    return (0.25 * a * a + 0.5) * (s1 - s2) * (s1 - s2) + (1.0 - r * r) * s1 * s2;
}

inline double case_means_statistic(const Theta& th, std::size_t n, double alpha) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double num = (th.mu1 - th.mu2) * (th.mu1 - th.mu2);
    const double den = th.sigma1 * th.sigma1 + th.sigma2 * th.sigma2 -
                       2.0 * th.rho * th.sigma1 * th.sigma2;
    return static_cast<double>(n) * (b1 * b1) / (a1 * a1 * a1 * a1) * num / den;
}

inline double case_variances_statistic(const Theta& th, std::size_t n, double alpha) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double num = (th.sigma1 - th.sigma2) * (th.sigma1 - th.sigma2);
    return static_cast<double>(n) * (b1 * b1 * b1) / std::pow(a1, 6) * num /
           beta_alpha(alpha, th.sigma1, th.sigma2, th.rho);
}

inline double case_correlation_statistic(const Theta& th, std::size_t n, double alpha,
                                         double rho0) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double q = 1.0 - th.rho * th.rho;
    return static_cast<double>(n) * (b1 * b1 * b1) / std::pow(a1, 6) * (th.rho - rho0) *
           (th.rho - rho0) / (q * q);
}

inline double wprime_statistic(const Theta& th, std::size_t n, double alpha, double rho0) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double q0 = 1.0 - rho0 * rho0;
    return static_cast<double>(n) * (b1 * b1 * b1) / std::pow(a1, 6) * (th.rho - rho0) *
           (th.rho - rho0) / (q0 * q0);
}

inline double rao_statistic(const Theta& th, std::size_t n, double rho0) {
    const double d = 1.0 - rho0 * th.rho;
    return static_cast<double>(n) * (th.rho - rho0) * (th.rho - rho0) / (d * d);
}

inline double case_means_and_variances_statistic(const Theta& th, std::size_t n, double alpha) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double mu_term = (th.mu1 - th.mu2) * (th.mu1 - th.mu2) /
                           (th.sigma1 * th.sigma1 + th.sigma2 * th.sigma2 -
                            2.0 * th.rho * th.sigma1 * th.sigma2);
    const double sig_term = b1 * (th.sigma1 - th.sigma2) * (th.sigma1 - th.sigma2) /
                            (a1 * a1 * beta_alpha(alpha, th.sigma1, th.sigma2, th.rho));
    return static_cast<double>(n) * (b1 * b1) / (a1 * a1 * a1 * a1) * (mu_term + sig_term);
}

inline double case_covariance_statistic(const Theta& th, std::size_t n, double alpha,
                                        double sigma12_0) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double m = th.sigma1 * th.sigma2 * th.rho - sigma12_0;
    const double den = th.sigma1 * th.sigma1 * th.sigma2 * th.sigma2 *
                       (a1 * a1 * (th.rho * th.rho + 1.0) + alpha * alpha * th.rho * th.rho);
    return static_cast<double>(n) * (b1 * b1 * b1) / (a1 * a1 * a1 * a1) * m * m / den;
}

inline double case_fixed_means_statistic(const Theta& th, std::size_t n, double alpha,
                                         double mu1_0, double mu2_0) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double t1 = (th.mu1 - mu1_0) / th.sigma1;
    const double t2 = (th.mu2 - mu2_0) / th.sigma2;
    const double num = (t1 - t2) * (t1 - t2) + 2.0 * (1.0 - th.rho) * t1 * t2;
    return static_cast<double>(n) * (b1 * b1) / (a1 * a1 * a1 * a1) * num /
           (1.0 - th.rho * th.rho);
}

// Explicit inverse of the sigma/rho block of V on the rho-only scale:
// V2^-1(rho) = (alpha+1)^-2 S21 [S21 + (alpha/(alpha+1))^2 S22]^-1 S21.
inline Mat3 v2_rho_inverse(double rho, double alpha) {
    const Mat3 s21 = detail::s21_rho(rho);
    const Mat3 s22 = detail::s22_rho(rho);
    const double a = alpha / (alpha + 1.0);
    Mat3 mid{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mid[i][j] = s21[i][j] + a * a * s22[i][j];
    const Mat3 inner = matmul(inverse(mid), s21);
    Mat3 out = matmul(s21, inner);
    const double f = 1.0 / ((alpha + 1.0) * (alpha + 1.0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] *= f;
    return out;
}

inline double case_var_cov_statistic(const Theta& th, std::size_t n, double alpha,
                                     double sigma1_0, double sigma2_0, double sigma12_0) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double w1 = 1.0 - sigma1_0 / th.sigma1;
    const double w2 = 1.0 - sigma2_0 / th.sigma2;
    const double w3 = th.rho - sigma12_0 / (th.sigma1 * th.sigma2) - th.rho * (2.0 - sigma1_0 / th.sigma1 - sigma2_0 / th.sigma2);
    const Vec3 w{w1, w2, w3};
    const Vec3 vw = matvec(v2_rho_inverse(th.rho, alpha), w);
    return static_cast<double>(n) * (b1 * b1 * b1) / (a1 * a1 * a1 * a1) * dot(w, vw);
}

inline double simw1_statistic(double gamma_hat, double rho_hat, std::size_t n, double alpha) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    const double a = alpha / a1;
    const double beta = 0.25 * (a * a + 2.0) * (gamma_hat - 1.0) * (gamma_hat - 1.0) +
                        (1.0 - rho_hat * rho_hat) * gamma_hat;
    return static_cast<double>(n) * (b1 * b1 * b1) / std::pow(a1, 6) * (gamma_hat - 1.0) *
           (gamma_hat - 1.0) / beta;
}

inline double simw2_statistic(double rho_uv_hat, std::size_t n, double alpha) {
    const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
    return static_cast<double>(n) * (b1 * b1 * b1) / std::pow(a1, 6) * rho_uv_hat * rho_uv_hat;
}

// ---------------------------------------------------------------------------
// Built-in constraints (restriction functions and their Jacobian columns).
// ---------------------------------------------------------------------------

inline Constraint constraint_means() {
    return {1, [](const Theta& t) { return std::vector<double>{t.mu1 - t.mu2}; },
            [](const Theta&) { return std::vector<Vec5>{{1.0, -1.0, 0.0, 0.0, 0.0}}; }};
}

inline Constraint constraint_variances() {
    return {1, [](const Theta& t) { return std::vector<double>{t.sigma1 - t.sigma2}; },
            [](const Theta&) { return std::vector<Vec5>{{0.0, 0.0, 1.0, -1.0, 0.0}}; }};
}

inline Constraint constraint_correlation(double rho0) {
    return {1, [rho0](const Theta& t) { return std::vector<double>{t.rho - rho0}; },
            [](const Theta&) { return std::vector<Vec5>{{0.0, 0.0, 0.0, 0.0, 1.0}}; }};
}

inline Constraint constraint_means_and_variances() {
    return {2,
            [](const Theta& t) {
                return std::vector<double>{t.mu1 - t.mu2, t.sigma1 - t.sigma2};
            },
            [](const Theta&) {
                return std::vector<Vec5>{{1.0, -1.0, 0.0, 0.0, 0.0},
                                         {0.0, 0.0, 1.0, -1.0, 0.0}};
            }};
}

inline Constraint constraint_covariance(double sigma12_0) {
    return {1,
            [sigma12_0](const Theta& t) {
                return std::vector<double>{t.sigma1 * t.sigma2 * t.rho - sigma12_0};
            },
            [](const Theta& t) {
                return std::vector<Vec5>{
                    {0.0, 0.0, t.sigma2 * t.rho, t.sigma1 * t.rho, t.sigma1 * t.sigma2}};
            }};
}

inline Constraint constraint_fixed_means(double mu1_0, double mu2_0) {
    return {2,
            [mu1_0, mu2_0](const Theta& t) {
                return std::vector<double>{t.mu1 - mu1_0, t.mu2 - mu2_0};
            },
            [](const Theta&) {
                return std::vector<Vec5>{{1.0, 0.0, 0.0, 0.0, 0.0},
                                         {0.0, 1.0, 0.0, 0.0, 0.0}};
            }};
}

inline Constraint constraint_var_cov(double sigma1_0, double sigma2_0, double sigma12_0) {
    return {3,
            [sigma1_0, sigma2_0, sigma12_0](const Theta& t) {
                return std::vector<double>{t.sigma1 - sigma1_0, t.sigma2 - sigma2_0,
                                           t.sigma1 * t.sigma2 * t.rho - sigma12_0};
            },
            [](const Theta& t) {
                return std::vector<Vec5>{
                    {0.0, 0.0, 1.0, 0.0, 0.0},
                    {0.0, 0.0, 0.0, 1.0, 0.0},
                    {0.0, 0.0, t.sigma2 * t.rho, t.sigma1 * t.rho, t.sigma1 * t.sigma2}};
            }};
}

// ---------------------------------------------------------------------------
// Sample-level tests: fit at alpha, then evaluate.
// ---------------------------------------------------------------------------

namespace detail {

struct FitInfo {
    Theta theta;
    bool clamped = false;
};

inline FitInfo fit_for_test(const PairedSample& s, double alpha) {
    const EstimateTrace tr = fit_alpha(s, alpha);
    return {tr.theta_hat, tr.rho_clamped};
}

inline TestResult finish_chi_square(double w, int r, double level, const FitInfo& fit,
                                    double alpha) {
    if (fit.clamped)
        return chi_square_result(std::numeric_limits<double>::infinity(), r, level, fit.theta,
                                 alpha, kBoundaryWarning);
    return chi_square_result(w, r, level, fit.theta, alpha);
}

}  // namespace detail

inline TestResult wald_general(const PairedSample& s, double alpha, const Constraint& c,
                               double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    const double w = fit.clamped ? std::numeric_limits<double>::infinity()
                                 : wald_statistic(fit.theta, s.n(), alpha, c);
    return detail::finish_chi_square(w, c.r, level, fit, alpha);
}

inline TestResult case_means(const PairedSample& s, double alpha, double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(case_means_statistic(fit.theta, s.n(), alpha), 1, level,
                                     fit, alpha);
}

inline TestResult case_variances(const PairedSample& s, double alpha, double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(case_variances_statistic(fit.theta, s.n(), alpha), 1, level,
                                     fit, alpha);
}

inline TestResult case_correlation(const PairedSample& s, double alpha, double rho0,
                                   double level = 0.05) {
    if (std::fabs(rho0) >= 1.0)
        throw std::invalid_argument("case_correlation: |rho0| must be < 1");
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(case_correlation_statistic(fit.theta, s.n(), alpha, rho0),
                                     1, level, fit, alpha);
}

inline TestResult modified_wprime(const PairedSample& s, double alpha, double rho0,
                                  double level = 0.05) {
    if (std::fabs(rho0) >= 1.0)
        throw std::invalid_argument("modified_wprime: |rho0| must be < 1");
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(wprime_statistic(fit.theta, s.n(), alpha, rho0), 1, level,
                                     fit, alpha);
}

inline TestResult classic_rao(const PairedSample& s, double rho0, double level = 0.05) {
    if (std::fabs(rho0) >= 1.0) throw std::invalid_argument("classic_rao: |rho0| must be < 1");
    const Theta th = mle(s);
    return detail::chi_square_result(rao_statistic(th, s.n(), rho0), 1, level, th, 0.0);
}

inline TestResult case_means_and_variances(const PairedSample& s, double alpha,
                                           double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(
        case_means_and_variances_statistic(fit.theta, s.n(), alpha), 2, level, fit, alpha);
}

inline TestResult case_covariance(const PairedSample& s, double alpha, double sigma12_0,
                                  double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(
        case_covariance_statistic(fit.theta, s.n(), alpha, sigma12_0), 1, level, fit, alpha);
}

inline TestResult case_fixed_means(const PairedSample& s, double alpha, double mu1_0,
                                   double mu2_0, double level = 0.05) {
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(
        case_fixed_means_statistic(fit.theta, s.n(), alpha, mu1_0, mu2_0), 2, level, fit, alpha);
}

inline TestResult case_var_cov(const PairedSample& s, double alpha, double sigma1_0,
                               double sigma2_0, double sigma12_0, double level = 0.05) {
    if (!(sigma1_0 > 0.0) || !(sigma2_0 > 0.0))
        throw std::invalid_argument("case_var_cov: null sigmas must be positive");
    const auto fit = detail::fit_for_test(s, alpha);
    return detail::finish_chi_square(
        case_var_cov_statistic(fit.theta, s.n(), alpha, sigma1_0, sigma2_0, sigma12_0), 3,
        level, fit, alpha);
}

// Equality of variances via cor(X+Y, X-Y) = 0 and the exact t distribution.
inline TestResult morgan_pitman(const PairedSample& s, Sided sided = Sided::two,
                                double level = 0.05) {
    const PairedSample uv = uv_transform(s);
    const Theta th = mle(uv);
    const double n = static_cast<double>(s.n());
    const double r = th.rho;
    const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
    return detail::signed_result(t, DistRef::Kind::student_t, n - 2.0, sided, level, th, 0.0);
}

// Zero-correlation exact t test on the raw pairs.
inline TestResult corr_exact(const PairedSample& s, Sided sided = Sided::two,
                             double level = 0.05) {
    const Theta th = mle(s);
    const double n = static_cast<double>(s.n());
    const double r = th.rho;
    const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
    return detail::signed_result(t, DistRef::Kind::student_t, n - 2.0, sided, level, th, 0.0);
}

inline TestResult paired_t(const PairedSample& s, Sided sided = Sided::two, double level = 0.05) {
    const double n = static_cast<double>(s.n());
    double md = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) md += s.xs[i] - s.ys[i];
    md /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        const double d = s.xs[i] - s.ys[i] - md;
        ss += d * d;
    }
    if (ss <= 0.0) throw degenerate_sample("paired_t: differences have zero variance");
    const double sd = std::sqrt(ss / (n - 1.0));
    const double t = md / (sd / std::sqrt(n));
    Theta th;
    try {
        th = mle(s);
    } catch (const degenerate_sample&) {
        th = Theta{};
    }
    return detail::signed_result(t, DistRef::Kind::student_t, n - 1.0, sided, level, th, 0.0);
}

enum class ZForm { z_variances, z_uv, z_means };

inline ZForm zform_from_name(const std::string& s) {
    if (s == "z_variances") return ZForm::z_variances;
    if (s == "z_uv") return ZForm::z_uv;
    if (s == "z_means") return ZForm::z_means;
    throw std::invalid_argument("unknown z form: " + s);
}

// Signed square roots of the one-degree Wald statistics, referred to N(0,1).
inline TestResult z_forms(const PairedSample& s, double alpha, ZForm which,
                          Sided sided = Sided::two, double level = 0.05) {
    switch (which) {
        case ZForm::z_means: {
            const auto fit = detail::fit_for_test(s, alpha);
            const Theta& th = fit.theta;
            const double sv = std::sqrt(th.sigma1 * th.sigma1 + th.sigma2 * th.sigma2 -
                                        2.0 * th.rho * th.sigma1 * th.sigma2);
            const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
            const double z = std::sqrt(static_cast<double>(s.n())) * (b1 / (a1 * a1)) *
                             (th.mu1 - th.mu2) / sv;
            return detail::signed_result(z, DistRef::Kind::std_normal, 0.0, sided, level, th,
                                         alpha);
        }
        case ZForm::z_variances: {
            const auto fit = detail::fit_for_test(s, alpha);
            const Theta& th = fit.theta;
            const double w = case_variances_statistic(th, s.n(), alpha);
            const double z = (th.sigma1 >= th.sigma2 ? 1.0 : -1.0) * std::sqrt(w);
            return detail::signed_result(z, DistRef::Kind::std_normal, 0.0, sided, level, th,
                                         alpha);
        }
        case ZForm::z_uv: {
            const PairedSample uv = uv_transform(s);
            const auto fit = detail::fit_for_test(uv, alpha);
            const Theta& th = fit.theta;
            const double w = simw2_statistic(th.rho, s.n(), alpha);
            const double z = (th.rho >= 0.0 ? 1.0 : -1.0) * std::sqrt(w);
            return detail::signed_result(z, DistRef::Kind::std_normal, 0.0, sided, level, th,
                                         alpha);
        }
    }
    throw std::invalid_argument("z_forms: bad selector");
}

// Dispatch a TestSpec. One-sided alternatives are admitted only for the t
// statistics; every chi-square case requires sided == two.
inline TestResult run_case(const PairedSample& s, const TestSpec& spec, double alpha) {
    switch (spec.kind) {
        case CaseKind::means:
            detail::require_two_sided(spec.sided, "means");
            return case_means(s, alpha, spec.level);
        case CaseKind::variances:
            detail::require_two_sided(spec.sided, "variances");
            return case_variances(s, alpha, spec.level);
        case CaseKind::correlation:
            detail::require_two_sided(spec.sided, "correlation");
            return case_correlation(s, alpha, spec.rho0, spec.level);
        case CaseKind::means_and_variances:
            detail::require_two_sided(spec.sided, "means_and_variances");
            return case_means_and_variances(s, alpha, spec.level);
        case CaseKind::covariance:
            detail::require_two_sided(spec.sided, "covariance");
            return case_covariance(s, alpha, spec.sigma12_0, spec.level);
        case CaseKind::fixed_means:
            detail::require_two_sided(spec.sided, "fixed_means");
            return case_fixed_means(s, alpha, spec.mu1_0, spec.mu2_0, spec.level);
        case CaseKind::var_cov:
            detail::require_two_sided(spec.sided, "var_cov");
            return case_var_cov(s, alpha, spec.sigma1_0, spec.sigma2_0, spec.sigma12_0,
                                spec.level);
        case CaseKind::morgan_pitman:
            return morgan_pitman(s, spec.sided, spec.level);
        case CaseKind::paired_t:
            return paired_t(s, spec.sided, spec.level);
        case CaseKind::classic_rao:
            detail::require_two_sided(spec.sided, "classic_rao");
            if (alpha != 0.0)
                throw std::invalid_argument("classic_rao is defined at alpha = 0");
            return classic_rao(s, spec.rho0, spec.level);
        case CaseKind::modified_wprime:
            detail::require_two_sided(spec.sided, "modified_wprime");
            return modified_wprime(s, alpha, spec.rho0, spec.level);
        case CaseKind::corr_exact:
            return corr_exact(s, spec.sided, spec.level);
    }
    throw std::invalid_argument("run_case: bad case kind");
}

}  // namespace renyi_bvn
