#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "renyi_bvn/csv.hpp"
#include "renyi_bvn/model.hpp"
#include "renyi_bvn/wald.hpp"

namespace renyi_bvn {

struct IFVector {
    double x = 0.0;
    double y = 0.0;
    Vec5 values{};
};

// Influence function of the estimator at (x, y); closed form of
// S_alpha^-1 f_theta^alpha(x,y) (u_theta(x,y) - c_alpha).
inline IFVector influence(const Theta& t, double alpha, double x, double y) {
    detail::require_conditioned(t);
    if (alpha < 0.0) throw std::invalid_argument("influence: alpha must be nonnegative");
    const double xt = (x - t.mu1) / t.sigma1;
    const double yt = (y - t.mu2) / t.sigma2;
    const double a1 = alpha + 1.0;
    const double e = std::exp(-alpha * 0.5 * mahalanobis_sq(t, x, y));
    IFVector out;
    out.x = x;
    out.y = y;
    out.values = {
        a1 * a1 * e * (x - t.mu1),
        a1 * a1 * e * (y - t.mu2),
        0.5 * a1 * a1 * a1 * e * t.sigma1 * (xt * xt - 1.0 / a1),
        0.5 * a1 * a1 * a1 * e * t.sigma2 * (yt * yt - 1.0 / a1),
        a1 * a1 * a1 * e * (xt * yt - 0.5 * t.rho * (xt * xt + yt * yt)),
    };
    return out;
}

// Same quantity assembled from the matrix pieces; kept as a cross-check.
inline IFVector influence_matrix_form(const Theta& t, double alpha, double x, double y) {
    const double fa = std::pow(density(t, x, y), alpha);
    const Vec5 u = score(t, x, y);
    const Vec5 c = c_alpha(t, alpha);
    Vec5 psi{};
    for (int j = 0; j < 5; ++j) psi[j] = fa * (u[j] - c[j]);
    IFVector out;
    out.x = x;
    out.y = y;
    out.values = matvec(s_inverse(t, alpha), psi);
    return out;
}

// Influence function of the Wald statistic's quadratic form:
// 2 IF' M (M' V M)^-1 M' IF, nonnegative by construction.
inline double second_order_if(const Theta& t, double alpha, const Constraint& c, double x,
                              double y) {
    const Vec5 f = influence(t, alpha, x, y).values;
    const Mat5 v = blocks(t, alpha).V;
    const std::vector<Vec5> cols = c.M_eval(t);
    if (static_cast<int>(cols.size()) != c.r)
        throw std::invalid_argument("second_order_if: constraint evaluator size mismatch");
    std::vector<std::vector<double>> mvm(c.r, std::vector<double>(c.r, 0.0));
    std::vector<double> mf(c.r, 0.0);
    for (int i = 0; i < c.r; ++i) {
        const Vec5 vmi = matvec(v, cols[i]);
        for (int j = 0; j < c.r; ++j) mvm[i][j] = dot(cols[j], vmi);
        mf[i] = dot(cols[i], f);
    }
    const std::vector<double> sol = detail::solve_small(std::move(mvm), mf);
    double quad = 0.0;
    for (int i = 0; i < c.r; ++i) quad += mf[i] * sol[i];
    return 2.0 * quad;
}

struct GridSpec {
    int nx = 101;
    int ny = 101;
    double x_lo = -5.0;
    double x_hi = 5.0;
    double y_lo = -5.0;
    double y_hi = 5.0;
};

// Default window: +-units marginal standard deviations around the means.
inline GridSpec default_grid(const Theta& t, double units = 5.0, int nx = 101, int ny = 101) {
    return {nx, ny, t.mu1 - units * t.sigma1, t.mu1 + units * t.sigma1,
            t.mu2 - units * t.sigma2, t.mu2 + units * t.sigma2};
}

enum class ParamIndex { mu1 = 0, mu2 = 1, sigma1 = 2, sigma2 = 3, rho = 4 };

inline ParamIndex param_from_name(const std::string& s) {
    if (s == "mu1") return ParamIndex::mu1;
    if (s == "mu2") return ParamIndex::mu2;
    if (s == "sigma1") return ParamIndex::sigma1;
    if (s == "sigma2") return ParamIndex::sigma2;
    if (s == "rho") return ParamIndex::rho;
    throw std::invalid_argument("unknown parameter: " + s);
}

inline const char* param_name(ParamIndex p) {
    switch (p) {
        case ParamIndex::mu1: return "mu1";
        case ParamIndex::mu2: return "mu2";
        case ParamIndex::sigma1: return "sigma1";
        case ParamIndex::sigma2: return "sigma2";
        case ParamIndex::rho: return "rho";
    }
    return "?";
}

namespace detail {

inline void check_grid(const GridSpec& g) {
    if (g.nx < 1 || g.ny < 1) throw std::invalid_argument("if_surface: grid needs >= 1 point");
    if (g.nx > 1 && !(g.x_hi > g.x_lo))
        throw std::invalid_argument("if_surface: empty x window");
    if (g.ny > 1 && !(g.y_hi > g.y_lo))
        throw std::invalid_argument("if_surface: empty y window");
    if (!(g.x_hi >= g.x_lo) || !(g.y_hi >= g.y_lo))
        throw std::invalid_argument("if_surface: grid bounds are reversed");
}

template <class F>
inline void write_surface(std::ostream& os, const GridSpec& g, F value) {
    check_grid(g);
    const double dx = g.nx > 1 ? (g.x_hi - g.x_lo) / static_cast<double>(g.nx - 1) : 0.0;
    const double dy = g.ny > 1 ? (g.y_hi - g.y_lo) / static_cast<double>(g.ny - 1) : 0.0;
    os << "x,y,value\n";
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x_lo + dx * static_cast<double>(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y_lo + dy * static_cast<double>(j);
            os << format_double(x) << ',' << format_double(y) << ',' << format_double(value(x, y))
               << '\n';
        }
    }
}

}  // namespace detail

// Surface of one influence-function component over the grid, written as
// "x,y,value" rows (x outermost).
inline void if_surface(std::ostream& os, const Theta& t, double alpha, ParamIndex param,
                       const GridSpec& grid) {
    const int idx = static_cast<int>(param);
    detail::write_surface(os, grid, [&](double x, double y) {
        return influence(t, alpha, x, y).values[idx];
    });
}

// Surface of the second-order influence function of a Wald restriction.
inline void if_surface(std::ostream& os, const Theta& t, double alpha, const Constraint& c,
                       const GridSpec& grid) {
    detail::write_surface(os, grid, [&](double x, double y) {
        return second_order_if(t, alpha, c, x, y);
    });
}

}  // namespace renyi_bvn
