// End-to-end checks of the command line tool. Invoked by ctest with the
// binary path and the data directory as arguments; shells out and compares
// the outputs against direct library calls.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "renyi_bvn/renyi_bvn.hpp"

using nlohmann::json;
namespace rb = renyi_bvn;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
    if (!ok) ++g_failures;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

RunResult run_cmd(const std::string& cmd) {
    const std::string out_path = "/tmp/cli_stdout.txt";
    const std::string err_path = "/tmp/cli_stderr.txt";
    const int rc = std::system((cmd + " >" + out_path + " 2>" + err_path).c_str());
    return {rc, slurp(out_path), slurp(err_path)};
}

bool same_double(const json& j, double v) {
    return j.is_number() && j.get<double>() == v;
}

bool theta_matches(const json& j, const rb::Theta& t) {
    return same_double(j.at("mu1"), t.mu1) && same_double(j.at("mu2"), t.mu2) &&
           same_double(j.at("sigma1"), t.sigma1) && same_double(j.at("sigma2"), t.sigma2) &&
           same_double(j.at("rho"), t.rho);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: cli_checks <renyi-bvn binary> <data dir>\n");
        return 2;
    }
    const std::string bin = argv[1];
    const std::string data = argv[2];
    const std::string cork = data + "/cork.csv";

    const auto [xs, ys] = rb::read_xy_csv(cork);
    const rb::PairedSample s(xs, ys);

    // estimate over an explicit alpha list reproduces the library fits exactly
    {
        const auto r = run_cmd(bin + " estimate --input " + cork + " --alphas 0,0.2 --trace");
        check(r.status == 0, "estimate exits cleanly");
        const json j = json::parse(r.out);
        check(j.at("n").get<std::size_t>() == s.n(), "estimate reports the sample size");
        const auto& est = j.at("estimates");
        check(est.size() == 2, "estimate returns one entry per alpha");
        bool match = true;
        const double want_alpha[2] = {0.0, 0.2};
        for (int i = 0; i < 2; ++i) {
            const rb::EstimateTrace tr = rb::fit_alpha(s, want_alpha[i]);
            const json& e = est[i];
            match = match && same_double(e.at("alpha"), tr.alpha) &&
                    theta_matches(e.at("theta"), tr.theta_hat) &&
                    e.at("converged").get<bool>() == tr.converged &&
                    same_double(e.at("objective"), tr.objective) &&
                    same_double(e.at("eq_residual"), tr.eq_residual_norm) &&
                    e.at("weights").size() == s.n();
        }
        check(match, "estimate values equal library fits bit for bit");
    }

    // the default grid sweep starts at the plain maximum likelihood fit
    {
        const auto r = run_cmd(bin + " estimate --input " + cork + " --grid-k 4");
        check(r.status == 0, "estimate grid sweep exits cleanly");
        const json j = json::parse(r.out);
        check(j.at("estimates").size() == 5, "grid sweep returns K+1 fits");
        const rb::Theta ml = rb::mle(s);
        check(theta_matches(j.at("estimates")[0].at("theta"), ml),
              "grid sweep starts at the maximum likelihood estimate");
    }

    // --log fits the base-e logarithm of the data
    {
        const auto r = run_cmd(bin + " estimate --input " + cork + " --alphas 0 --log");
        check(r.status == 0, "estimate --log exits cleanly");
        const json j = json::parse(r.out);
        const rb::Theta ml = rb::mle(rb::log_transform(s));
        check(theta_matches(j.at("estimates")[0].at("theta"), ml),
              "estimate --log reproduces the moments of the logged data");
    }

    // hypothesis tests reproduce the library results
    {
        const auto r = run_cmd(bin + " test --input " + cork + " --case paired_t --log");
        check(r.status == 0, "test paired_t exits cleanly");
        const json j = json::parse(r.out);
        const rb::TestResult want = rb::paired_t(rb::log_transform(s));
        check(same_double(j.at("statistic"), want.statistic) &&
                  same_double(j.at("p_value"), want.p_value) &&
                  j.at("dist").get<std::string>() == want.dist &&
                  same_double(j.at("df"), want.df),
              "paired_t output equals the library result");
        check(std::fabs(j.at("statistic").get<double>() - (-1.454)) < 1e-3,
              "paired_t statistic lands on the reference value");
    }
    {
        const auto r = run_cmd(bin + " test --input " + cork + " --case morgan_pitman --log");
        const json j = json::parse(r.out);
        const rb::TestResult want = rb::morgan_pitman(rb::log_transform(s));
        check(r.status == 0 && same_double(j.at("statistic"), want.statistic) &&
                  same_double(j.at("p_value"), want.p_value),
              "morgan_pitman output equals the library result");
        check(std::fabs(j.at("statistic").get<double>() - (-1.656)) < 1e-3,
              "morgan_pitman statistic lands on the reference value");
    }
    {
        const auto r =
            run_cmd(bin + " test --input " + cork + " --case correlation --alpha 0.3 --rho0 0.2");
        const json j = json::parse(r.out);
        const rb::TestResult want = rb::case_correlation(s, 0.3, 0.2);
        check(r.status == 0 && same_double(j.at("statistic"), want.statistic) &&
                  same_double(j.at("p_value"), want.p_value) &&
                  theta_matches(j.at("theta"), want.theta_used),
              "correlation case respects --alpha and --rho0");
    }
    {
        const auto r = run_cmd(bin + " test --input " + cork + " --case z_means --sided greater");
        const json j = json::parse(r.out);
        const rb::TestResult want = rb::z_forms(s, 0.0, rb::ZForm::z_means, rb::Sided::greater);
        check(r.status == 0 && same_double(j.at("statistic"), want.statistic) &&
                  same_double(j.at("p_value"), want.p_value),
              "z_means honors --sided greater");
    }

    // influence surface on a single-point grid equals the direct library call
    {
        const std::string out = "/tmp/cli_surface.csv";
        const auto r = run_cmd(bin + " influence --theta 1 2 1 1.5 0.3 --alpha 0.3 " +
                               "--target rho --grid 1,1,0.5,0.5,2.5,2.5 --out " + out);
        check(r.status == 0, "influence exits cleanly");
        std::ifstream f(out);
        std::string header, row, extra;
        std::getline(f, header);
        std::getline(f, row);
        const bool no_extra = !std::getline(f, extra);
        const rb::Theta t{1.0, 2.0, 1.0, 1.5, 0.3};
        const double want = rb::influence(t, 0.3, 0.5, 2.5).values[4];
        const auto last_comma = row.rfind(',');
        const double got = std::stod(row.substr(last_comma + 1));
        check(header == "x,y,value" && no_extra && got == want,
              "single-point surface equals influence() exactly");
    }

    // bad inputs exit nonzero
    check(run_cmd(bin + " influence --theta 1 2 1 1.5 0.3 --target rho --grid 0,5,0,1,0,1")
                  .status != 0,
          "malformed --grid is rejected");
    check(run_cmd(bin + " estimate --input " + data + "/no_such_file.csv").status != 0,
          "missing input file is rejected");
    check(run_cmd(bin + " test --input " + cork + " --case not_a_case").status != 0,
          "unknown case name is rejected");

    // simulate: thread count leaves the report byte-identical; seed override works
    {
        const std::string conf = "/tmp/cli_sim.conf";
        {
            std::ofstream c(conf);
            c << "n = 25\nreplications = 60\nrho_values = 0\nalpha_values = 0\n"
              << "scenarios = pure\ntest = simW2\nseed = 4242\n";
        }
        const std::string out1 = "/tmp/cli_sim1.csv", out8 = "/tmp/cli_sim8.csv";
        const auto r1 = run_cmd(bin + " simulate --config " + conf + " --threads 1 --out " + out1);
        const auto r8 = run_cmd(bin + " simulate --config " + conf + " --threads 8 --out " + out8);
        check(r1.status == 0 && r8.status == 0, "simulate exits cleanly");
        check(r1.err.find("replications") != std::string::npos,
              "small replication count warns on stderr");
        const std::string rep1 = slurp(out1);
        check(!rep1.empty() && rep1 == slurp(out8),
              "simulate reports are byte-identical across thread counts");
        check(rep1.rfind("scenario,fraction,rho,alpha,n,level,level_se,mse,mse_se,nonconverged",
                         0) == 0,
              "simulate report starts with the pinned header");

        const auto renv = run_cmd("RENYI_BVN_SEED=99 " + bin + " simulate --config " + conf +
                                  " --threads 1 --out " + out8);
        check(renv.status == 0 && slurp(out8) != rep1,
              "RENYI_BVN_SEED overrides the configured seed");
    }

    // select-alpha agrees with the library
    {
        const auto r = run_cmd(bin + " select-alpha --input " + cork + " --grid-k 5");
        check(r.status == 0, "select-alpha exits cleanly");
        const json j = json::parse(r.out);
        const rb::SelectionResult want =
            rb::select_alpha(s, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, rb::PilotSpec{});
        check(same_double(j.at("alpha_star"), want.alpha_star) &&
                  theta_matches(j.at("theta"), want.theta_hat) &&
                  j.at("rounds").size() == want.rounds.size(),
              "select-alpha output equals the library result");
    }

    std::printf("%s\n", g_failures == 0 ? "all cli checks passed" : "cli checks FAILED");
    return g_failures == 0 ? 0 : 1;
}
