#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "renyi_bvn/model.hpp"
#include "renyi_bvn/rng.hpp"

namespace renyi_bvn {

struct PairedSample {
    std::vector<double> xs;
    std::vector<double> ys;

    PairedSample() = default;
    PairedSample(std::vector<double> x, std::vector<double> y)
        : xs(std::move(x)), ys(std::move(y)) {
        if (xs.size() != ys.size())
            throw std::invalid_argument("PairedSample: xs and ys must have equal length");
        if (xs.size() < 3) throw std::invalid_argument("PairedSample: need at least 3 pairs");
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
                throw std::invalid_argument("PairedSample: non-finite entry");
    }

    std::size_t n() const { return xs.size(); }
};

inline std::pair<double, double> bvn_pair(const Theta& t, RngStream& rng) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double x = t.mu1 + t.sigma1 * z1;
    const double y = t.mu2 + t.sigma2 * (t.rho * z1 + std::sqrt(1.0 - t.rho * t.rho) * z2);
    return {x, y};
}

inline PairedSample sample_bvn(const Theta& t, std::size_t n, RngStream& rng) {
    t.require_valid();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [x, y] = bvn_pair(t, rng);
        xs[i] = x;
        ys[i] = y;
    }
    return PairedSample(std::move(xs), std::move(ys));
}

// Bivariate t: location mu, scale matrix from (sigma1, sigma2, rho), df degrees
// of freedom. X = mu + Z / sqrt(W/df) with Z centered normal, W ~ chi^2_df.
inline std::pair<double, double> bvt_pair(const Theta& t, double df, RngStream& rng) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double s = std::sqrt(rng.chi_square(df) / df);
    const double zx = t.sigma1 * z1;
    const double zy = t.sigma2 * (t.rho * z1 + std::sqrt(1.0 - t.rho * t.rho) * z2);
    return {t.mu1 + zx / s, t.mu2 + zy / s};
}

inline PairedSample sample_bvt(const Theta& t, double df, std::size_t n, RngStream& rng) {
    t.require_valid();
    if (!(df > 0.0)) throw std::invalid_argument("sample_bvt: df must be positive");
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [x, y] = bvt_pair(t, df, rng);
        xs[i] = x;
        ys[i] = y;
    }
    return PairedSample(std::move(xs), std::move(ys));
}

// Elementwise natural logarithm, for datasets recorded on a positive scale.
inline PairedSample log_transform(const PairedSample& s) {
    std::vector<double> xs(s.n()), ys(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) {
        if (!(s.xs[i] > 0.0) || !(s.ys[i] > 0.0))
            throw std::domain_error("log_transform: all values must be positive");
        xs[i] = std::log(s.xs[i]);
        ys[i] = std::log(s.ys[i]);
    }
    return PairedSample(std::move(xs), std::move(ys));
}

// Sum/difference rotation (U, V) = (X + Y, X - Y); equal marginal variances of
// (X, Y) correspond to cor(U, V) = 0.
inline PairedSample uv_transform(const PairedSample& s) {
    std::vector<double> us(s.n()), vs(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) {
        us[i] = s.xs[i] + s.ys[i];
        vs[i] = s.xs[i] - s.ys[i];
    }
    return PairedSample(std::move(us), std::move(vs));
}

}  // namespace renyi_bvn
