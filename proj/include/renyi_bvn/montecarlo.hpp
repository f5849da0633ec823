#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "renyi_bvn/csv.hpp"
#include "renyi_bvn/estimator.hpp"
#include "renyi_bvn/rng.hpp"
#include "renyi_bvn/sample.hpp"
#include "renyi_bvn/special.hpp"
#include "renyi_bvn/wald.hpp"

namespace renyi_bvn {

enum class ScenarioKind { pure, slight, regular, heavy };

inline const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::pure: return "pure";
        case ScenarioKind::slight: return "slight";
        case ScenarioKind::regular: return "regular";
        case ScenarioKind::heavy: return "heavy";
    }
    return "?";
}

inline ScenarioKind scenario_from_name(const std::string& s) {
    for (ScenarioKind k :
         {ScenarioKind::pure, ScenarioKind::slight, ScenarioKind::regular, ScenarioKind::heavy})
        if (s == scenario_name(k)) return k;
    throw std::invalid_argument("unknown scenario: " + s);
}

struct Scenario {
    ScenarioKind kind = ScenarioKind::pure;
    double contamination_fraction = 0.0;
    Theta base_theta{};

    void validate() const {
        base_theta.require_valid();
        const double f = contamination_fraction;
        auto is = [f](double v) { return std::fabs(f - v) < 1e-12; };
        if (kind == ScenarioKind::pure) {
            if (!is(0.0))
                throw std::invalid_argument("scenario: pure requires fraction 0");
        } else if (!is(0.05) && !is(0.10) && !is(0.20)) {
            throw std::invalid_argument(
                "scenario: contamination fraction must be one of 0.05, 0.10, 0.20");
        }
    }
};

// How contaminated rows are allocated: a fixed count round(fraction*n) placed
// at the end of the sample, or an independent Bernoulli(fraction) draw per row.
enum class ContaminationMode { fixed_count, mixture };

inline ContaminationMode contamination_from_name(const std::string& s) {
    if (s == "fixed") return ContaminationMode::fixed_count;
    if (s == "mixture") return ContaminationMode::mixture;
    throw std::invalid_argument("unknown contamination mode: " + s);
}

namespace detail {

inline constexpr double kRegularTDf = 5.0;

inline Theta contaminant_theta(const Scenario& sc, double rho) {
    const Theta& b = sc.base_theta;
    switch (sc.kind) {
        case ScenarioKind::slight: {
            const double s = std::sqrt(3.0);
            return {b.mu1, b.mu2, s, s, rho};
        }
        case ScenarioKind::heavy:
            return {b.mu1, b.mu2, 1.0, 5.0, rho};
        case ScenarioKind::regular:
            return {b.mu1, b.mu2, b.sigma1, b.sigma2, rho};
        case ScenarioKind::pure:
            break;
    }
    throw std::logic_error("contaminant_theta: pure scenario has no contaminant");
}

inline std::pair<double, double> contaminant_pair(const Scenario& sc, const Theta& ct,
                                                  RngStream& rng) {
    if (sc.kind == ScenarioKind::regular) return bvt_pair(ct, kRegularTDf, rng);
    return bvn_pair(ct, rng);
}

}  // namespace detail

// One simulated sample of size n at correlation rho. In fixed_count mode the
// last round(fraction*n) rows come from the contaminating law; in mixture mode
// each row is contaminated independently with probability fraction.
inline PairedSample generate(const Scenario& sc, double rho, std::size_t n, RngStream& rng,
                             ContaminationMode mode = ContaminationMode::fixed_count) {
    sc.validate();
    if (!(std::fabs(rho) < 1.0)) throw std::invalid_argument("generate: |rho| must be < 1");
    if (n < 3) throw std::invalid_argument("generate: n must be >= 3");
    Theta base = sc.base_theta;
    base.rho = rho;
    std::vector<double> xs(n), ys(n);
    if (sc.kind == ScenarioKind::pure) {
        for (std::size_t i = 0; i < n; ++i) {
            auto [x, y] = bvn_pair(base, rng);
            xs[i] = x;
            ys[i] = y;
        }
        return PairedSample(std::move(xs), std::move(ys));
    }
    const Theta ct = detail::contaminant_theta(sc, rho);
    if (mode == ContaminationMode::fixed_count) {
        const std::size_t m = static_cast<std::size_t>(
            std::lround(sc.contamination_fraction * static_cast<double>(n)));
        for (std::size_t i = 0; i < n; ++i) {
            const bool contaminated = i >= n - m;
            auto [x, y] =
                contaminated ? detail::contaminant_pair(sc, ct, rng) : bvn_pair(base, rng);
            xs[i] = x;
            ys[i] = y;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const bool contaminated = rng.uniform() < sc.contamination_fraction;
            auto [x, y] =
                contaminated ? detail::contaminant_pair(sc, ct, rng) : bvn_pair(base, rng);
            xs[i] = x;
            ys[i] = y;
        }
    }
    return PairedSample(std::move(xs), std::move(ys));
}

// Which statistic drives the rejection decision in a simulation run. simW1 is
// the equal-variances Wald form in the (gamma, rho) ratio parametrization;
// simW2 is the null-correlation Wald form applied to the (U, V) rotation.
struct SimTestSel {
    enum class Tag { case_test, simw1, simw2 };
    Tag tag = Tag::simw2;
    CaseKind kind = CaseKind::morgan_pitman;  // used when tag == case_test
};

inline SimTestSel parse_sim_test(const std::string& s) {
    if (s == "simW1") return {SimTestSel::Tag::simw1, CaseKind::variances};
    if (s == "simW2") return {SimTestSel::Tag::simw2, CaseKind::correlation};
    if (s == "MP") return {SimTestSel::Tag::case_test, CaseKind::morgan_pitman};
    return {SimTestSel::Tag::case_test, case_from_name(s)};
}

inline std::string sim_test_name(const SimTestSel& t) {
    switch (t.tag) {
        case SimTestSel::Tag::simw1: return "simW1";
        case SimTestSel::Tag::simw2: return "simW2";
        case SimTestSel::Tag::case_test: return case_name(t.kind);
    }
    return "?";
}

// Correlation-family tests report mean |rho_uv|; everything else reports the
// variance-ratio deviation mean |gamma - 1| in the CSV's mse column.
inline bool mse_uses_rho(const SimTestSel& t) {
    if (t.tag == SimTestSel::Tag::simw2) return true;
    if (t.tag != SimTestSel::Tag::case_test) return false;
    switch (t.kind) {
        case CaseKind::correlation:
        case CaseKind::modified_wprime:
        case CaseKind::classic_rao:
        case CaseKind::corr_exact:
            return true;
        default:
            return false;
    }
}

struct SimConfig {
    std::size_t n = 25;
    std::size_t replications = 5000;
    std::vector<double> rho_values{0.0};
    std::vector<double> alpha_values{0.0};
    std::vector<Scenario> scenarios;
    SimTestSel test{};
    double level = 0.05;
    std::uint64_t seed = 12345;
    ContaminationMode contamination = ContaminationMode::fixed_count;

    void validate() const {
        if (n < 3) throw std::invalid_argument("sim config: n must be >= 3");
        if (replications < 1)
            throw std::invalid_argument("sim config: replications must be >= 1");
        if (rho_values.empty() || alpha_values.empty() || scenarios.empty())
            throw std::invalid_argument("sim config: rho_values, alpha_values and scenarios "
                                        "must be nonempty");
        for (double r : rho_values)
            if (!(std::fabs(r) < 1.0))
                throw std::invalid_argument("sim config: |rho| must be < 1");
        for (double a : alpha_values)
            if (!(a >= 0.0)) throw std::invalid_argument("sim config: alphas must be >= 0");
        if (!(level > 0.0 && level < 1.0))
            throw std::invalid_argument("sim config: level must lie in (0, 1)");
        for (const Scenario& sc : scenarios) sc.validate();
    }
};

struct SimCell {
    std::string scenario;
    double fraction = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    std::size_t n = 0;
    double level = 0.0;
    double level_se = 0.0;
    double mse_gamma = 0.0;
    double mse_gamma_se = 0.0;
    double mse_rho = 0.0;
    double mse_rho_se = 0.0;
    std::size_t nonconverged = 0;
};

struct SimReport {
    SimTestSel test{};
    double nominal_level = 0.05;
    std::size_t replications = 0;
    std::vector<SimCell> cells;
    std::vector<std::string> warnings;
};

namespace detail {

struct RepRecord {
    bool valid = false;
    bool nonconverged = false;
    bool reject = false;
    double gamma_dev = 0.0;
    double rho_uv_abs = 0.0;
};

struct CellCrits {
    double chi2_1 = 0.0;
    double chi2_2 = 0.0;
    double chi2_3 = 0.0;
    double t_mp = 0.0;       // |T| cutoff, df n-2
    double t_paired = 0.0;   // |T| cutoff, df n-1
};

inline CellCrits make_crits(double level, std::size_t n) {
    CellCrits c;
    c.chi2_1 = chi2_upper_quantile(level, 1.0);
    c.chi2_2 = chi2_upper_quantile(level, 2.0);
    c.chi2_3 = chi2_upper_quantile(level, 3.0);
    c.t_mp = t_upper_quantile(level / 2.0, static_cast<double>(n) - 2.0);
    c.t_paired = t_upper_quantile(level / 2.0, static_cast<double>(n) - 1.0);
    return c;
}

inline bool decide_case(const SimTestSel& test, const PairedSample& s, const Theta& th_o,
                        const Theta& th_u, double alpha, const CellCrits& crit) {
    const std::size_t n = s.n();
    switch (test.tag) {
        case SimTestSel::Tag::simw1:
            return case_variances_statistic(th_o, n, alpha) > crit.chi2_1;
        case SimTestSel::Tag::simw2:
            return simw2_statistic(th_u.rho, n, alpha) > crit.chi2_1;
        case SimTestSel::Tag::case_test:
            break;
    }
    switch (test.kind) {
        case CaseKind::means:
            return case_means_statistic(th_o, n, alpha) > crit.chi2_1;
        case CaseKind::variances:
            return case_variances_statistic(th_o, n, alpha) > crit.chi2_1;
        case CaseKind::correlation:
            return case_correlation_statistic(th_o, n, alpha, 0.0) > crit.chi2_1;
        case CaseKind::means_and_variances:
            return case_means_and_variances_statistic(th_o, n, alpha) > crit.chi2_2;
        case CaseKind::covariance:
            return case_covariance_statistic(th_o, n, alpha, 0.0) > crit.chi2_1;
        case CaseKind::fixed_means:
            return case_fixed_means_statistic(th_o, n, alpha, 0.0, 0.0) > crit.chi2_2;
        case CaseKind::var_cov:
            return case_var_cov_statistic(th_o, n, alpha, 1.0, 1.0, 0.0) > crit.chi2_3;
        case CaseKind::classic_rao:
            return rao_statistic(th_o, n, 0.0) > crit.chi2_1;
        case CaseKind::modified_wprime:
            return wprime_statistic(th_o, n, alpha, 0.0) > crit.chi2_1;
        case CaseKind::morgan_pitman: {
            const double r = th_u.rho;
            const double t =
                r * std::sqrt((static_cast<double>(n) - 2.0) / (1.0 - r * r));
            return std::fabs(t) > crit.t_mp;
        }
        case CaseKind::corr_exact: {
            const double r = th_o.rho;
            const double t =
                r * std::sqrt((static_cast<double>(n) - 2.0) / (1.0 - r * r));
            return std::fabs(t) > crit.t_mp;
        }
        case CaseKind::paired_t: {
            const double n_d = static_cast<double>(n);
            double md = 0.0;
            for (std::size_t i = 0; i < n; ++i) md += s.xs[i] - s.ys[i];
            md /= n_d;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = s.xs[i] - s.ys[i] - md;
                ss += d * d;
            }
            if (ss <= 0.0) throw degenerate_sample("paired_t: zero variance");
            const double t = md / (std::sqrt(ss / (n_d - 1.0)) / std::sqrt(n_d));
            return std::fabs(t) > crit.t_paired;
        }
    }
    throw std::logic_error("decide_case: unhandled test");
}

}  // namespace detail

// Full replication sweep. Deterministic for a fixed seed: replication r uses
// RNG stream r regardless of the thread count, and aggregation is a fixed-order
// reduction over the preallocated per-replication records.
inline SimReport run(const SimConfig& cfg, int threads = 1) {
    cfg.validate();
    SimReport report;
    report.test = cfg.test;
    report.nominal_level = cfg.level;
    report.replications = cfg.replications;
    if (cfg.replications < 100)
        report.warnings.push_back("replications < 100: Monte Carlo errors will be large");

    const std::size_t R = cfg.replications;
    const std::size_t na = cfg.alpha_values.size();
    const detail::CellCrits crits = detail::make_crits(cfg.level, cfg.n);
    const int nthreads = threads < 1 ? 1 : threads;

    // Exact-correlation rejection for MP uses the UV Pearson estimate; the
    // same cutoff applies to corr_exact on the raw pairs (same df).
    for (const Scenario& sc : cfg.scenarios) {
        for (double rho : cfg.rho_values) {
            std::vector<detail::RepRecord> records(R * na);
            auto worker = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t rep = lo; rep < hi; ++rep) {
                    RngStream rng(cfg.seed, rep);
                    PairedSample s(std::vector<double>{0, 0, 0},
                                   std::vector<double>{0, 0, 0});
                    try {
                        s = generate(sc, rho, cfg.n, rng, cfg.contamination);
                    } catch (const std::exception&) {
                        for (std::size_t ai = 0; ai < na; ++ai) {
                            auto& rec = records[rep * na + ai];
                            rec.valid = false;
                            rec.nonconverged = true;
                        }
                        continue;
                    }
                    const PairedSample uv = uv_transform(s);
                    for (std::size_t ai = 0; ai < na; ++ai) {
                        auto& rec = records[rep * na + ai];
                        const double alpha = cfg.alpha_values[ai];
                        try {
                            const EstimateTrace tr_o = fit_alpha(s, alpha);
                            const EstimateTrace tr_u = fit_alpha(uv, alpha);
                            rec.gamma_dev =
                                std::fabs(tr_o.theta_hat.sigma1 / tr_o.theta_hat.sigma2 - 1.0);
                            rec.rho_uv_abs = std::fabs(tr_u.theta_hat.rho);
                            rec.nonconverged = !tr_o.converged || !tr_u.converged;
                            rec.reject = detail::decide_case(cfg.test, s, tr_o.theta_hat,
                                                             tr_u.theta_hat, alpha, crits);
                            rec.valid = true;
                        } catch (const std::exception&) {
                            rec.valid = false;
                            rec.nonconverged = true;
                        }
                    }
                }
            };
            if (nthreads == 1 || R < 2) {
                worker(0, R);
            } else {
                std::vector<std::thread> pool;
                const std::size_t chunk = (R + nthreads - 1) / nthreads;
                for (int t = 0; t < nthreads; ++t) {
                    const std::size_t lo = static_cast<std::size_t>(t) * chunk;
                    if (lo >= R) break;
                    const std::size_t hi = std::min(R, lo + chunk);
                    pool.emplace_back(worker, lo, hi);
                }
                for (auto& th : pool) th.join();
            }

            for (std::size_t ai = 0; ai < na; ++ai) {
                SimCell cell;
                cell.scenario = scenario_name(sc.kind);
                cell.fraction = sc.contamination_fraction;
                cell.rho = rho;
                cell.alpha = cfg.alpha_values[ai];
                cell.n = cfg.n;
                std::size_t rejects = 0, nonconv = 0, nvalid = 0;
                double sg = 0.0, sg2 = 0.0, sr = 0.0, sr2 = 0.0;
                for (std::size_t rep = 0; rep < R; ++rep) {
                    const auto& rec = records[rep * na + ai];
                    if (rec.nonconverged) ++nonconv;
                    if (!rec.valid) continue;
                    ++nvalid;
                    if (rec.reject) ++rejects;
                    sg += rec.gamma_dev;
                    sg2 += rec.gamma_dev * rec.gamma_dev;
                    sr += rec.rho_uv_abs;
                    sr2 += rec.rho_uv_abs * rec.rho_uv_abs;
                }
                const double Rd = static_cast<double>(R);
                cell.level = static_cast<double>(rejects) / Rd;
                cell.level_se = std::sqrt(cell.level * (1.0 - cell.level) / Rd);
                if (nvalid > 0) {
                    const double nv = static_cast<double>(nvalid);
                    cell.mse_gamma = sg / nv;
                    cell.mse_rho = sr / nv;
                    if (nvalid > 1) {
                        const double vg =
                            std::max(0.0, (sg2 - nv * cell.mse_gamma * cell.mse_gamma) /
                                              (nv - 1.0));
                        const double vr =
                            std::max(0.0, (sr2 - nv * cell.mse_rho * cell.mse_rho) / (nv - 1.0));
                        cell.mse_gamma_se = std::sqrt(vg / nv);
                        cell.mse_rho_se = std::sqrt(vr / nv);
                    }
                }
                cell.nonconverged = nonconv;
                if (static_cast<double>(nonconv) > 0.01 * Rd) {
                    std::ostringstream w;
                    w << "cell " << cell.scenario << " fraction " << cell.fraction << " rho "
                      << cell.rho << " alpha " << cell.alpha << ": " << nonconv << "/" << R
                      << " non-convergent fits";
                    report.warnings.push_back(w.str());
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

inline double mse_gamma(const std::vector<double>& gamma_hats) {
    if (gamma_hats.empty()) throw std::invalid_argument("mse_gamma: empty record set");
    double s = 0.0;
    for (double g : gamma_hats) s += std::fabs(g - 1.0);
    return s / static_cast<double>(gamma_hats.size());
}

inline double mse_rho(const std::vector<double>& rho_uv_hats) {
    if (rho_uv_hats.empty()) throw std::invalid_argument("mse_rho: empty record set");
    double s = 0.0;
    for (double r : rho_uv_hats) s += std::fabs(r);
    return s / static_cast<double>(rho_uv_hats.size());
}

inline void write_report_csv(std::ostream& os, const SimReport& rep) {
    const bool use_rho = mse_uses_rho(rep.test);
    os << "scenario,fraction,rho,alpha,n,level,level_se,mse,mse_se,nonconverged\n";
    for (const SimCell& c : rep.cells) {
        os << c.scenario << ',' << format_double(c.fraction) << ',' << format_double(c.rho)
           << ',' << format_double(c.alpha) << ',' << c.n << ',' << format_double(c.level) << ','
           << format_double(c.level_se) << ','
           << format_double(use_rho ? c.mse_rho : c.mse_gamma) << ','
           << format_double(use_rho ? c.mse_rho_se : c.mse_gamma_se) << ',' << c.nonconverged
           << '\n';
    }
}

// ---------------------------------------------------------------------------
// Flat key=value config files.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : v) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    for (const std::string& item : split_list(v)) {
        double d;
        if (!parse_double(item, d))
            throw std::runtime_error("sim config: bad number '" + item + "' for key " + key);
        out.push_back(d);
    }
    return out;
}

}  // namespace detail

inline SimConfig parse_sim_config(std::istream& in) {
    SimConfig cfg;
    cfg.scenarios.clear();
    std::vector<std::string> scenario_kinds;
    std::vector<double> fractions;
    bool have_n = false, have_r = false, have_test = false, have_scenarios = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("sim config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string val = detail::trim(trimmed.substr(eq + 1));
        if (key == "n") {
            cfg.n = static_cast<std::size_t>(std::stoull(val));
            have_n = true;
        } else if (key == "replications") {
            cfg.replications = static_cast<std::size_t>(std::stoull(val));
            have_r = true;
        } else if (key == "rho_values") {
            cfg.rho_values = detail::parse_double_list(val, key);
        } else if (key == "alpha_values") {
            cfg.alpha_values = detail::parse_double_list(val, key);
        } else if (key == "scenarios") {
            scenario_kinds = detail::split_list(val);
            have_scenarios = true;
        } else if (key == "fractions") {
            fractions = detail::parse_double_list(val, key);
        } else if (key == "test") {
            cfg.test = parse_sim_test(val);
            have_test = true;
        } else if (key == "level") {
            double d;
            if (!detail::parse_double(val, d))
                throw std::runtime_error("sim config: bad level value");
            cfg.level = d;
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        } else if (key == "contamination") {
            cfg.contamination = contamination_from_name(val);
        } else {
            throw std::runtime_error("sim config: unknown key '" + key + "'");
        }
    }
    if (!have_n || !have_r || !have_test || !have_scenarios)
        throw std::runtime_error("sim config: keys n, replications, scenarios and test are "
                                 "required");
    for (const std::string& name : scenario_kinds) {
        const ScenarioKind kind = scenario_from_name(name);
        if (kind == ScenarioKind::pure) {
            cfg.scenarios.push_back({kind, 0.0, Theta{}});
        } else {
            if (fractions.empty())
                throw std::runtime_error(
                    "sim config: fractions required for contaminated scenarios");
            for (double f : fractions) cfg.scenarios.push_back({kind, f, Theta{}});
        }
    }
    cfg.validate();
    return cfg;
}

inline SimConfig parse_sim_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_sim_config(in);
}

// ---------------------------------------------------------------------------
// Data-driven tuning parameter selection.
// ---------------------------------------------------------------------------

struct PilotSpec {
    enum class Kind { mle, alpha02, custom };
    Kind kind = Kind::mle;
    Theta custom{};
};

struct SelectionRound {
    Theta pilot;
    std::vector<double> objectives;  // one per grid alpha
    double alpha_chosen = 0.0;
    double objective_chosen = 0.0;
};

struct SelectionResult {
    double alpha_star = 0.0;
    Theta theta_hat;
    std::vector<SelectionRound> rounds;
    std::string warning;
};

// Minimize ||theta_alpha - theta_pilot||^2 + tr(V_alpha(theta_alpha))/n over
// the grid, feeding the winner back as the next pilot until stable.
inline SelectionResult select_alpha(const PairedSample& s, std::vector<double> grid,
                                    const PilotSpec& pilot, int max_rounds = 20) {
    if (grid.empty()) throw std::invalid_argument("select_alpha: empty grid");
    for (double a : grid)
        if (!(a >= 0.0)) throw std::invalid_argument("select_alpha: alphas must be >= 0");
    if (max_rounds < 1) throw std::invalid_argument("select_alpha: max_rounds must be >= 1");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<EstimateTrace> fits;
    fits.reserve(grid.size());
    for (double a : grid) fits.push_back(fit_alpha(s, a));

    std::vector<double> trace_term(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Mat5 v = blocks(fits[i].theta_hat, grid[i]).V;
        double tr = 0.0;
        for (int j = 0; j < 5; ++j) tr += v[j][j];
        trace_term[i] = tr / static_cast<double>(s.n());
    }

    Theta pilot_theta;
    switch (pilot.kind) {
        case PilotSpec::Kind::mle: pilot_theta = mle(s); break;
        case PilotSpec::Kind::alpha02: pilot_theta = fit_alpha(s, 0.2).theta_hat; break;
        case PilotSpec::Kind::custom:
            pilot.custom.require_valid();
            pilot_theta = pilot.custom;
            break;
    }

    SelectionResult res;
    std::size_t prev_idx = grid.size();  // sentinel
    for (int round = 0; round < max_rounds; ++round) {
        SelectionRound r;
        r.pilot = pilot_theta;
        r.objectives.resize(grid.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Vec5 d{fits[i].theta_hat.mu1 - pilot_theta.mu1,
                         fits[i].theta_hat.mu2 - pilot_theta.mu2,
                         fits[i].theta_hat.sigma1 - pilot_theta.sigma1,
                         fits[i].theta_hat.sigma2 - pilot_theta.sigma2,
                         fits[i].theta_hat.rho - pilot_theta.rho};
            r.objectives[i] = dot(d, d) + trace_term[i];
            if (r.objectives[i] < r.objectives[best]) best = i;  // ties keep smallest alpha
        }
        r.alpha_chosen = grid[best];
        r.objective_chosen = r.objectives[best];
        res.rounds.push_back(std::move(r));
        if (best == prev_idx) {
            res.alpha_star = grid[best];
            res.theta_hat = fits[best].theta_hat;
            return res;
        }
        prev_idx = best;
        pilot_theta = fits[best].theta_hat;
    }
    // Not stable after max_rounds: pick the smaller objective among the last
    // two visited rounds and say so.
    const SelectionRound& last = res.rounds.back();
    const SelectionRound& prev =
        res.rounds.size() >= 2 ? res.rounds[res.rounds.size() - 2] : res.rounds.back();
    const SelectionRound& winner =
        last.objective_chosen <= prev.objective_chosen ? last : prev;
    res.warning = "select_alpha: argmin oscillated; returning the smaller-objective candidate";
    res.alpha_star = winner.alpha_chosen;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == winner.alpha_chosen) res.theta_hat = fits[i].theta_hat;
    return res;
}

}  // namespace renyi_bvn
