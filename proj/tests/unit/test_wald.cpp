#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>

#include "renyi_bvn/csv.hpp"
#include "renyi_bvn/rng.hpp"
#include "renyi_bvn/wald.hpp"

using namespace renyi_bvn;

namespace {

Theta random_theta(RngStream& rng) {
    return {rng.normal(), rng.normal(), 0.3 + 2.7 * rng.uniform(), 0.3 + 2.7 * rng.uniform(),
            -0.9 + 1.8 * rng.uniform()};
}

PairedSample load_pairs(const std::string& name) {
    const auto [xs, ys] = read_xy_csv(std::string(DATA_DIR) + "/" + name);
    return PairedSample(xs, ys);
}

}  // namespace

TEST_CASE("hand-checked statistic values") {
    const std::size_t n100 = 100, n25 = 25;
    REQUIRE_THAT(case_means_statistic(Theta{0.2, 0.0, 1.0, 1.0, 0.5}, n100, 0.0),
                 Catch::Matchers::WithinRel(4.0, 1e-14));
    const Theta th{0.0, 0.0, 1.0, 1.0, 0.5};
    REQUIRE_THAT(wprime_statistic(th, n25, 0.0, 0.0), Catch::Matchers::WithinRel(6.25, 1e-14));
    REQUIRE_THAT(rao_statistic(th, n25, 0.0), Catch::Matchers::WithinRel(6.25, 1e-14));
    REQUIRE_THAT(case_correlation_statistic(th, n25, 0.0, 0.0),
                 Catch::Matchers::WithinRel(100.0 / 9.0, 1e-14));
}

TEST_CASE("closed-form cases agree with the general quadratic form") {
    RngStream rng(99, 0);
    for (int k = 0; k < 20; ++k) {
        const Theta t = random_theta(rng);
        const std::size_t n = 50;
        for (double alpha : {0.0, 0.3, 1.0}) {
            const double w1 = case_means_statistic(t, n, alpha);
            const double w2 = case_variances_statistic(t, n, alpha);
            const double w3 = case_correlation_statistic(t, n, alpha, 0.2);
            const double w4 = case_means_and_variances_statistic(t, n, alpha);
            const double w5 = case_covariance_statistic(t, n, alpha, 0.1);
            const double w6 = case_fixed_means_statistic(t, n, alpha, 0.3, -0.2);
            const double w7 = case_var_cov_statistic(t, n, alpha, 1.0, 1.2, 0.1);

            REQUIRE_THAT(w1, Catch::Matchers::WithinRel(
                                 wald_statistic(t, n, alpha, constraint_means()), 1e-8));
            REQUIRE_THAT(w2, Catch::Matchers::WithinRel(
                                 wald_statistic(t, n, alpha, constraint_variances()), 1e-8));
            REQUIRE_THAT(w3, Catch::Matchers::WithinRel(
                                 wald_statistic(t, n, alpha, constraint_correlation(0.2)), 1e-8));
            REQUIRE_THAT(w4,
                         Catch::Matchers::WithinRel(
                             wald_statistic(t, n, alpha, constraint_means_and_variances()), 1e-8));
            REQUIRE_THAT(w5, Catch::Matchers::WithinRel(
                                 wald_statistic(t, n, alpha, constraint_covariance(0.1)), 1e-8));
            REQUIRE_THAT(w6,
                         Catch::Matchers::WithinRel(
                             wald_statistic(t, n, alpha, constraint_fixed_means(0.3, -0.2)), 1e-8));
            REQUIRE_THAT(w7,
                         Catch::Matchers::WithinRel(
                             wald_statistic(t, n, alpha, constraint_var_cov(1.0, 1.2, 0.1)), 1e-8));

            for (double w : {w1, w2, w3, w4, w5, w6, w7}) REQUIRE(w >= 0.0);

            // the modification replaces the estimated 1-rho^2 by its null value
            const double q_hat = 1.0 - t.rho * t.rho, q0 = 1.0 - 0.2 * 0.2;
            REQUIRE_THAT(wprime_statistic(t, n, alpha, 0.2),
                         Catch::Matchers::WithinRel(w3 * q_hat * q_hat / (q0 * q0), 1e-12));

            // equal-variance statistic in (gamma, rho) form
            REQUIRE_THAT(simw1_statistic(t.sigma1 / t.sigma2, t.rho, n, alpha),
                         Catch::Matchers::WithinRel(w2, 1e-12));
            // zero-correlation modified statistic
            REQUIRE(simw2_statistic(t.rho, n, alpha) == wprime_statistic(t, n, alpha, 0.0));
        }
    }
}

TEST_CASE("statistics vanish when the restriction holds exactly") {
    const Theta t{0.4, 0.4, 1.2, 1.2, 0.25};
    const std::size_t n = 50;
    for (double alpha : {0.0, 0.3}) {
        REQUIRE(case_means_statistic(t, n, alpha) == 0.0);
        REQUIRE(case_variances_statistic(t, n, alpha) == 0.0);
        REQUIRE(case_correlation_statistic(t, n, alpha, 0.25) == 0.0);
        REQUIRE(case_means_and_variances_statistic(t, n, alpha) == 0.0);
        REQUIRE(case_covariance_statistic(t, n, alpha, 1.2 * 1.2 * 0.25) == 0.0);
        REQUIRE(case_fixed_means_statistic(t, n, alpha, 0.4, 0.4) == 0.0);
        REQUIRE(case_var_cov_statistic(t, n, alpha, 1.2, 1.2, 1.2 * 1.2 * 0.25) == 0.0);
    }
}

TEST_CASE("testing the fitted value itself never rejects") {
    RngStream rng(99, 5);
    const PairedSample s = sample_bvn(Theta{0.3, 0.1, 1.0, 1.3, 0.4}, 50, rng);
    for (double alpha : {0.0, 0.3}) {
        const Theta th = fit_alpha(s, alpha).theta_hat;
        const TestResult rc = wald_general(s, alpha, constraint_correlation(th.rho));
        REQUIRE(rc.statistic == 0.0);
        REQUIRE(rc.p_value == 1.0);
        REQUIRE_FALSE(rc.reject_at_level);
        const TestResult cc = case_covariance(s, alpha, th.sigma1 * th.sigma2 * th.rho);
        REQUIRE(cc.statistic == 0.0);
        REQUIRE(cc.p_value == 1.0);
        REQUIRE_FALSE(cc.reject_at_level);
    }
}

TEST_CASE("the joint means-variances statistic splits into its two pieces") {
    RngStream rng(99, 6);
    for (int k = 0; k < 20; ++k) {
        const Theta t = random_theta(rng);
        for (double alpha : {0.0, 0.3, 1.0})
            REQUIRE_THAT(case_means_and_variances_statistic(t, 50, alpha),
                         Catch::Matchers::WithinRel(case_means_statistic(t, 50, alpha) +
                                                        case_variances_statistic(t, 50, alpha),
                                                    1e-12));
    }
}

TEST_CASE("low-order special cases reduce to the textbook forms") {
    RngStream rng(99, 7);
    for (int k = 0; k < 10; ++k) {
        const Theta t = random_theta(rng);
        // the covariance denominator at alpha = 0
        const double m = t.sigma1 * t.sigma2 * t.rho - 0.2;
        const double want5 = 50.0 * m * m /
                             (t.sigma1 * t.sigma1 * t.sigma2 * t.sigma2 * (t.rho * t.rho + 1.0));
        REQUIRE_THAT(case_covariance_statistic(t, 50, 0.0, 0.2),
                     Catch::Matchers::WithinRel(want5, 1e-14));

        // with no correlation the fixed-means case decouples per coordinate
        const Theta t0{t.mu1, t.mu2, t.sigma1, t.sigma2, 0.0};
        const double alpha = 0.3;
        const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
        const double q1 = (t.mu1 - 0.3) / t.sigma1, q2 = (t.mu2 + 0.2) / t.sigma2;
        const double want6 = 50.0 * (b1 * b1) / (a1 * a1 * a1 * a1) * (q1 * q1 + q2 * q2);
        REQUIRE_THAT(case_fixed_means_statistic(t0, 50, alpha, 0.3, -0.2),
                     Catch::Matchers::WithinRel(want6, 1e-12));
    }
}

TEST_CASE("the means case equals a location test on the rotated pairs") {
    RngStream rng(99, 8);
    const PairedSample s = sample_bvn(Theta{0.4, 0.2, 1.0, 1.4, 0.3}, 60, rng);
    for (double alpha : {0.0, 0.3}) {
        const Theta uvfit = fit_alpha(uv_transform(s), alpha).theta_hat;
        const double b1 = 2.0 * alpha + 1.0, a1 = alpha + 1.0;
        const double w_v = 60.0 * (b1 * b1) / (a1 * a1 * a1 * a1) * uvfit.mu2 * uvfit.mu2 /
                           (uvfit.sigma2 * uvfit.sigma2);
        REQUIRE_THAT(case_means(s, alpha).statistic, Catch::Matchers::WithinRel(w_v, 1e-8));
    }
}

TEST_CASE("mirrored pairs have equal variances by construction") {
    const PairedSample s({1, 2, 3, 5, 2, 7}, {2, 1, 5, 3, 7, 2});
    const TestResult mp = morgan_pitman(s);
    REQUIRE(mp.statistic == 0.0);
    REQUIRE_THAT(mp.p_value, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_FALSE(mp.reject_at_level);
}

TEST_CASE("location-scale invariance of the comparison statistics") {
    RngStream rng(99, 1);
    for (int k = 0; k < 10; ++k) {
        const Theta t = random_theta(rng);
        const double c = 0.1 + 5.0 * rng.uniform();
        const Theta tc{c * t.mu1 + 2.0, c * t.mu2 + 2.0, c * t.sigma1, c * t.sigma2, t.rho};
        const std::size_t n = 40;
        for (double alpha : {0.0, 0.5}) {
            REQUIRE_THAT(case_means_statistic(tc, n, alpha),
                         Catch::Matchers::WithinRel(case_means_statistic(t, n, alpha), 1e-10));
            REQUIRE_THAT(case_variances_statistic(tc, n, alpha),
                         Catch::Matchers::WithinRel(case_variances_statistic(t, n, alpha), 1e-10));
            REQUIRE_THAT(
                case_correlation_statistic(tc, n, alpha, 0.3),
                Catch::Matchers::WithinRel(case_correlation_statistic(t, n, alpha, 0.3), 1e-10));
            REQUIRE_THAT(case_means_and_variances_statistic(tc, n, alpha),
                         Catch::Matchers::WithinRel(
                             case_means_and_variances_statistic(t, n, alpha), 1e-10));
        }
    }
}

TEST_CASE("sigma-rho variance block inverse") {
    for (double rho : {-0.8, -0.2, 0.0, 0.4, 0.9})
        for (double alpha : {0.0, 0.3, 1.0}) {
            const Mat3 prod = matmul(v2_rho_inverse(rho, alpha), detail::v2_rho(rho, alpha));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    REQUIRE_THAT(prod[i][j],
                                 Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-10));
        }
}

TEST_CASE("signed forms square to the chi-square statistics") {
    RngStream rng(99, 2);
    const PairedSample s = sample_bvn(Theta{0.3, 0.1, 1.0, 1.3, 0.4}, 60, rng);
    for (double alpha : {0.0, 0.2, 0.7}) {
        const TestResult zm = z_forms(s, alpha, ZForm::z_means);
        const TestResult zv = z_forms(s, alpha, ZForm::z_variances);
        const TestResult zu = z_forms(s, alpha, ZForm::z_uv);
        const TestResult wm = case_means(s, alpha);
        const TestResult wv = case_variances(s, alpha);
        REQUIRE_THAT(zm.statistic * zm.statistic,
                     Catch::Matchers::WithinRel(wm.statistic, 1e-12));
        REQUIRE_THAT(zv.statistic * zv.statistic,
                     Catch::Matchers::WithinRel(wv.statistic, 1e-12));
        const TestResult wu = modified_wprime(uv_transform(s), alpha, 0.0);
        REQUIRE_THAT(zu.statistic * zu.statistic,
                     Catch::Matchers::WithinRel(wu.statistic, 1e-12));

        // signs carry the direction of the alternative
        REQUIRE((zm.statistic >= 0.0) == (wm.theta_used.mu1 >= wm.theta_used.mu2));
        REQUIRE((zv.statistic >= 0.0) == (wv.theta_used.sigma1 >= wv.theta_used.sigma2));
        REQUIRE((zu.statistic >= 0.0) == (zu.theta_used.rho >= 0.0));
        REQUIRE(zm.dist == "std_normal");

        // one-sided halves split the two-sided p-value
        const TestResult zg = z_forms(s, alpha, ZForm::z_means, Sided::greater);
        const TestResult zl = z_forms(s, alpha, ZForm::z_means, Sided::less);
        REQUIRE_THAT(zg.p_value + zl.p_value, Catch::Matchers::WithinRel(1.0, 1e-12));
        const double smaller = std::min(zg.p_value, zl.p_value);
        REQUIRE_THAT(zm.p_value, Catch::Matchers::WithinRel(2.0 * smaller, 1e-12));
    }

    // paired t is the finite-sample rescaling of the alpha = 0 signed means form
    const TestResult tp = paired_t(s);
    const TestResult zm0 = z_forms(s, 0.0, ZForm::z_means);
    const double nn = static_cast<double>(s.n());
    REQUIRE_THAT(tp.statistic,
                 Catch::Matchers::WithinRel(std::sqrt((nn - 1.0) / nn) * zm0.statistic, 1e-12));
    REQUIRE(tp.dist == "student_t");
    REQUIRE(tp.df == nn - 1.0);
}

TEST_CASE("tree growth measurements reproduce the reference analysis") {
    // the reference analysis works on the natural-log scale
    const PairedSample cork = log_transform(load_pairs("cork.csv"));
    REQUIRE(cork.n() == 28);

    const TestResult tp = paired_t(cork);
    REQUIRE_THAT(tp.statistic, Catch::Matchers::WithinAbs(-1.454, 1e-3));
    REQUIRE_THAT(tp.p_value, Catch::Matchers::WithinAbs(0.157, 1e-3));
    REQUIRE_FALSE(tp.reject_at_level);

    const TestResult mp = morgan_pitman(cork);
    REQUIRE_THAT(mp.statistic, Catch::Matchers::WithinAbs(-1.656, 1e-3));
    REQUIRE_THAT(mp.p_value, Catch::Matchers::WithinAbs(0.110, 1e-3));
    REQUIRE(mp.df == 26.0);
    REQUIRE_FALSE(mp.reject_at_level);

    const PairedSample trimmed = log_transform(load_pairs("cork_deleted.csv"));
    REQUIRE(trimmed.n() == 26);
    const TestResult tp2 = paired_t(trimmed);
    REQUIRE_THAT(tp2.statistic, Catch::Matchers::WithinAbs(-2.233, 1e-3));
    REQUIRE_THAT(tp2.p_value, Catch::Matchers::WithinAbs(0.035, 1e-3));
    REQUIRE(tp2.reject_at_level);
    const TestResult mp2 = morgan_pitman(trimmed);
    REQUIRE_THAT(mp2.statistic, Catch::Matchers::WithinAbs(-3.034, 1e-3));
    REQUIRE_THAT(mp2.p_value, Catch::Matchers::WithinAbs(0.006, 1e-3));
    REQUIRE(mp2.reject_at_level);

    // across the tuning sweep the one-sided signed variance form keeps
    // rejecting on the full data, while the two-sided test only picks up the
    // difference once the two outlying trees stop masking it (alpha >= 0.3)
    for (int k = 0; k <= 10; ++k) {
        const double alpha = 0.1 * k;
        const TestResult z = z_forms(cork, alpha, ZForm::z_variances, Sided::less);
        REQUIRE(z.statistic < 0.0);
        REQUIRE(z.reject_at_level);
        const TestResult w = case_variances(cork, alpha);
        REQUIRE(w.reject_at_level == (alpha >= 0.3));
    }
}

TEST_CASE("dispatcher guards") {
    RngStream rng(99, 3);
    const PairedSample s = sample_bvn(Theta{0, 0, 1, 1, 0.2}, 30, rng);

    TestSpec spec;
    spec.kind = CaseKind::means;
    spec.sided = Sided::greater;
    REQUIRE_THROWS_AS(run_case(s, spec, 0.0), std::invalid_argument);

    spec.kind = CaseKind::classic_rao;
    spec.sided = Sided::two;
    REQUIRE_THROWS_AS(run_case(s, spec, 0.2), std::invalid_argument);
    REQUIRE_NOTHROW(run_case(s, spec, 0.0));

    REQUIRE_THROWS_AS(case_correlation(s, 0.2, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(modified_wprime(s, 0.2, -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(case_means(s, 0.2, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(paired_t(PairedSample({1, 2, 3}, {2, 3, 4})), degenerate_sample);

    REQUIRE(case_from_name("var_cov") == CaseKind::var_cov);
    REQUIRE_THROWS_AS(case_from_name("nope"), std::invalid_argument);
    REQUIRE(zform_from_name("z_uv") == ZForm::z_uv);
}

TEST_CASE("a nearly collinear sample pushes the fit to the boundary") {
    RngStream rng(99, 4);
    const int n = 40;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = rng.normal();
        ys[i] = xs[i] + 1.4e-5 * rng.normal();
    }
    const PairedSample s(xs, ys);

    const EstimateTrace tr = fit_alpha(s, 0.2);
    REQUIRE(tr.rho_clamped);

    const TestResult res = case_correlation(s, 0.2, 0.0);
    REQUIRE(std::isinf(res.statistic));
    REQUIRE(res.p_value == 0.0);
    REQUIRE(res.reject_at_level);
    REQUIRE_THAT(res.warning, Catch::Matchers::ContainsSubstring("clamped"));
}
