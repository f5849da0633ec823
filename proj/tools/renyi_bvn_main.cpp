// Command line front end: estimate / test / influence / simulate / select-alpha.
// JSON results go to stdout; CSV surfaces and reports go to --out (or stdout);
// warnings go to stderr and never change the exit status.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "renyi_bvn/renyi_bvn.hpp"

namespace rb = renyi_bvn;
using nlohmann::json;

namespace {

json theta_json(const rb::Theta& t) {
    return json{{"mu1", t.mu1},
                {"mu2", t.mu2},
                {"sigma1", t.sigma1},
                {"sigma2", t.sigma2},
                {"rho", t.rho}};
}

json trace_json(const rb::EstimateTrace& tr, bool with_log) {
    json j{{"alpha", tr.alpha},
           {"theta", theta_json(tr.theta_hat)},
           {"converged", tr.converged},
           {"rho_clamped", tr.rho_clamped},
           {"inner_iterations", tr.inner_iterations},
           {"objective", tr.objective},
           {"eq_residual", tr.eq_residual_norm}};
    if (with_log) {
        j["vartheta"] = json{{"mu1", tr.vartheta_hat.mu1},
                             {"mu2", tr.vartheta_hat.mu2},
                             {"zeta1_sq", tr.vartheta_hat.zeta1_sq},
                             {"zeta2_sq", tr.vartheta_hat.zeta2_sq},
                             {"rho", tr.vartheta_hat.rho}};
        j["weights"] = tr.weights;
    }
    return j;
}

rb::PairedSample load_sample(const std::string& path) {
    auto [xs, ys] = rb::read_xy_csv(path);
    return rb::PairedSample(std::move(xs), std::move(ys));
}

rb::Sided parse_sided(const std::string& s) {
    if (s == "two") return rb::Sided::two;
    if (s == "greater") return rb::Sided::greater;
    if (s == "less") return rb::Sided::less;
    throw std::invalid_argument("--sided must be one of two, greater, less");
}

rb::GridSpec parse_grid(const std::string& spec) {
    const auto parts = rb::detail::split_list(spec);
    if (parts.size() != 6)
        throw std::invalid_argument("--grid expects nx,ny,x_lo,x_hi,y_lo,y_hi");
    double v[6];
    for (int i = 0; i < 6; ++i)
        if (!rb::detail::parse_double(parts[i], v[i]))
            throw std::invalid_argument("--grid expects nx,ny,x_lo,x_hi,y_lo,y_hi");
    if (v[0] < 1.0 || v[1] < 1.0 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
        throw std::invalid_argument("--grid: nx and ny must be positive integers");
    return {static_cast<int>(v[0]), static_cast<int>(v[1]), v[2], v[3], v[4], v[5]};
}

// A null-parameter bundle shared by the test and influence subcommands.
struct NullParams {
    double rho0 = 0.0;
    double sigma12 = 0.0;
    double mu10 = 0.0;
    double mu20 = 0.0;
    double sigma10 = 1.0;
    double sigma20 = 1.0;
};

void add_null_params(CLI::App* sub, NullParams& np) {
    sub->add_option("--rho0", np.rho0, "null correlation");
    sub->add_option("--sigma12", np.sigma12, "null covariance");
    sub->add_option("--mu10", np.mu10, "null mean of the first coordinate");
    sub->add_option("--mu20", np.mu20, "null mean of the second coordinate");
    sub->add_option("--sigma10", np.sigma10, "null standard deviation, first coordinate");
    sub->add_option("--sigma20", np.sigma20, "null standard deviation, second coordinate");
}

rb::Constraint constraint_for(rb::CaseKind kind, const NullParams& np) {
    switch (kind) {
        case rb::CaseKind::means: return rb::constraint_means();
        case rb::CaseKind::variances: return rb::constraint_variances();
        case rb::CaseKind::correlation: return rb::constraint_correlation(np.rho0);
        case rb::CaseKind::means_and_variances: return rb::constraint_means_and_variances();
        case rb::CaseKind::covariance: return rb::constraint_covariance(np.sigma12);
        case rb::CaseKind::fixed_means: return rb::constraint_fixed_means(np.mu10, np.mu20);
        case rb::CaseKind::var_cov:
            return rb::constraint_var_cov(np.sigma10, np.sigma20, np.sigma12);
        default:
            throw std::invalid_argument(std::string("no influence surface for case ") +
                                        rb::case_name(kind));
    }
}

int run_estimate(const std::string& input, const std::string& alphas, int grid_k, double xi,
                 bool log_scale, bool with_trace) {
    rb::PairedSample s = load_sample(input);
    if (log_scale) s = rb::log_transform(s);
    std::vector<rb::EstimateTrace> traces;
    if (!alphas.empty()) {
        for (double a : rb::detail::parse_double_list(alphas, "--alphas"))
            traces.push_back(rb::fit_alpha(s, a, 20, xi));
    } else {
        traces = rb::irm_fit(s, grid_k, xi);
    }
    json out{{"input", input}, {"n", s.n()}, {"estimates", json::array()}};
    for (const auto& tr : traces) {
        if (tr.rho_clamped)
            std::cerr << "warning: correlation clamped at the boundary for alpha = " << tr.alpha
                      << "\n";
        if (!tr.converged)
            std::cerr << "warning: fit at alpha = " << tr.alpha << " did not converge\n";
        out["estimates"].push_back(trace_json(tr, with_trace));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_test(const std::string& input, const std::string& case_name, double alpha,
             const NullParams& np, const std::string& sided, double level, bool log_scale) {
    rb::PairedSample s = load_sample(input);
    if (log_scale) s = rb::log_transform(s);
    const rb::Sided sd = parse_sided(sided);
    rb::TestResult res;
    if (case_name.rfind("z_", 0) == 0) {
        res = rb::z_forms(s, alpha, rb::zform_from_name(case_name), sd, level);
    } else {
        rb::TestSpec spec;
        spec.kind = rb::case_from_name(case_name);
        spec.rho0 = np.rho0;
        spec.sigma12_0 = np.sigma12;
        spec.mu1_0 = np.mu10;
        spec.mu2_0 = np.mu20;
        spec.sigma1_0 = np.sigma10;
        spec.sigma2_0 = np.sigma20;
        spec.sided = sd;
        spec.level = level;
        res = rb::run_case(s, spec, alpha);
    }
    if (!res.warning.empty()) std::cerr << "warning: " << res.warning << "\n";
    json out{{"case", case_name},
             {"alpha", res.alpha},
             {"statistic", res.statistic},
             {"dist", res.dist},
             {"df", res.df},
             {"p_value", res.p_value},
             {"reject_at_level", res.reject_at_level},
             {"level", level},
             {"sided", sided},
             {"n", s.n()},
             {"theta", theta_json(res.theta_used)},
             {"warning", res.warning}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_influence(const std::vector<double>& theta_vals, double alpha, const std::string& target,
                  const std::string& grid_spec, const std::string& out_path,
                  const NullParams& np) {
    const rb::Theta t{theta_vals[0], theta_vals[1], theta_vals[2], theta_vals[3], theta_vals[4]};
    t.require_valid();
    const rb::GridSpec g = grid_spec.empty() ? rb::default_grid(t) : parse_grid(grid_spec);

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open " + out_path + " for writing");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;

    bool is_param = true;
    rb::ParamIndex param = rb::ParamIndex::mu1;
    try {
        param = rb::param_from_name(target);
    } catch (const std::invalid_argument&) {
        is_param = false;
    }
    if (is_param)
        rb::if_surface(os, t, alpha, param, g);
    else
        rb::if_surface(os, t, alpha, constraint_for(rb::case_from_name(target), np), g);
    return 0;
}

int run_simulate(const std::string& config, const std::string& out_path, int threads) {
    rb::SimConfig cfg = rb::parse_sim_config_file(config);
    if (const char* env_seed = std::getenv("RENYI_BVN_SEED"))
        cfg.seed = static_cast<std::uint64_t>(std::stoull(env_seed));
    const rb::SimReport rep = rb::run(cfg, threads);
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open " + out_path + " for writing");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    rb::write_report_csv(os, rep);
    return 0;
}

int run_select_alpha(const std::string& input, const std::string& pilot, int grid_k) {
    const rb::PairedSample s = load_sample(input);
    if (grid_k < 1) throw std::invalid_argument("--grid-k must be >= 1");
    std::vector<double> grid;
    for (int k = 0; k <= grid_k; ++k)
        grid.push_back(static_cast<double>(k) / static_cast<double>(grid_k));
    rb::PilotSpec ps;
    if (pilot == "mle")
        ps.kind = rb::PilotSpec::Kind::mle;
    else if (pilot == "0.2" || pilot == "alpha02")
        ps.kind = rb::PilotSpec::Kind::alpha02;
    else
        throw std::invalid_argument("--pilot must be mle or 0.2");
    const rb::SelectionResult res = rb::select_alpha(s, grid, ps);
    if (!res.warning.empty()) std::cerr << "warning: " << res.warning << "\n";
    json rounds = json::array();
    for (const auto& r : res.rounds)
        rounds.push_back(json{{"pilot", theta_json(r.pilot)},
                              {"objectives", r.objectives},
                              {"alpha_chosen", r.alpha_chosen},
                              {"objective_chosen", r.objective_chosen}});
    json out{{"input", input},
             {"alpha_star", res.alpha_star},
             {"theta", theta_json(res.theta_hat)},
             {"rounds", rounds},
             {"warning", res.warning}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust bivariate-normal estimation, testing and simulation"};
    app.require_subcommand(1);

    // estimate
    auto* est = app.add_subcommand("estimate", "fit the model over one or more alphas");
    std::string est_input, est_alphas;
    int est_grid_k = 20;
    double est_xi = 1e-8;
    bool est_log = false, est_trace = false;
    est->add_option("--input", est_input, "two-column CSV of paired observations")->required();
    auto* alphas_opt = est->add_option("--alphas", est_alphas, "comma list of alpha values");
    auto* gridk_opt =
        est->add_option("--grid-k", est_grid_k, "fit on the grid k/K, k = 0..K (default 20)");
    alphas_opt->excludes(gridk_opt);
    gridk_opt->excludes(alphas_opt);
    est->add_option("--xi", est_xi, "inner convergence tolerance (default 1e-8)");
    est->add_flag("--log", est_log, "fit the base-e logarithm of the data");
    est->add_flag("--trace", est_trace, "include working moments and per-row weights");

    // test
    auto* tst = app.add_subcommand("test", "run one hypothesis test");
    std::string tst_input, tst_case, tst_sided = "two";
    double tst_alpha = 0.0, tst_level = 0.05;
    bool tst_log = false;
    NullParams tst_np;
    tst->add_option("--input", tst_input, "two-column CSV of paired observations")->required();
    tst->add_option("--case", tst_case, "which test to run")->required();
    tst->add_option("--alpha", tst_alpha, "tuning parameter (default 0)");
    add_null_params(tst, tst_np);
    tst->add_option("--sided", tst_sided, "two, greater or less (t/z statistics only)");
    tst->add_option("--level", tst_level, "nominal level (default 0.05)");
    tst->add_flag("--log", tst_log, "test the base-e logarithm of the data");

    // influence
    auto* inf = app.add_subcommand("influence", "tabulate an influence surface");
    std::vector<double> inf_theta;
    double inf_alpha = 0.0;
    std::string inf_target, inf_grid, inf_out;
    NullParams inf_np;
    inf->add_option("--theta", inf_theta, "mu1 mu2 sigma1 sigma2 rho")
        ->expected(5)
        ->required();
    inf->add_option("--alpha", inf_alpha, "tuning parameter (default 0)");
    inf->add_option("--target", inf_target, "parameter name or Wald case name")->required();
    inf->add_option("--grid", inf_grid, "nx,ny,x_lo,x_hi,y_lo,y_hi (default 101x101, +-5 sd)");
    inf->add_option("--out", inf_out, "output CSV path (default stdout)");
    add_null_params(inf, inf_np);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a replication study from a config file");
    std::string sim_config, sim_out;
    int sim_threads = 1;
    sim->add_option("--config", sim_config, "key = value config file")->required();
    sim->add_option("--out", sim_out, "output CSV path (default stdout)");
    sim->add_option("--threads", sim_threads, "worker threads (default 1)");

    // select-alpha
    auto* sel = app.add_subcommand("select-alpha", "pick alpha by the pilot-distance rule");
    std::string sel_input, sel_pilot = "mle";
    int sel_grid_k = 10;
    sel->add_option("--input", sel_input, "two-column CSV of paired observations")->required();
    sel->add_option("--pilot", sel_pilot, "pilot estimate: mle or 0.2");
    sel->add_option("--grid-k", sel_grid_k, "candidate grid k/K, k = 0..K (default 10)");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(est))
            return run_estimate(est_input, est_alphas, est_grid_k, est_xi, est_log, est_trace);
        if (app.got_subcommand(tst))
            return run_test(tst_input, tst_case, tst_alpha, tst_np, tst_sided, tst_level,
                            tst_log);
        if (app.got_subcommand(inf))
            return run_influence(inf_theta, inf_alpha, inf_target, inf_grid, inf_out, inf_np);
        if (app.got_subcommand(sim)) return run_simulate(sim_config, sim_out, sim_threads);
        if (app.got_subcommand(sel)) return run_select_alpha(sel_input, sel_pilot, sel_grid_k);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
