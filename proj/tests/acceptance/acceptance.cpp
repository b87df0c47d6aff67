// Acceptance run: one line per criterion, nonzero exit if any fails.
//
//   acceptance            run everything
//   acceptance 3 7        run a subset by number

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "../oracles.hpp"
#include "horseshoe/bounds_oracle.hpp"
#include "horseshoe/cli.hpp"
#include "horseshoe/csv.hpp"
#include "horseshoe/experiments.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/special_functions.hpp"
#include "horseshoe/verification.hpp"

using namespace horseshoe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> steps(double lo, double hi, double step) {
    std::vector<double> v;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long i = 0; i <= count; ++i) v.push_back(lo + static_cast<double>(i) * step);
    return v;
}

// ---------------------------------------------------------------------------

Outcome integral_bounds() {
    double worst = 0.0;
    std::string where;
    std::size_t points = 0;
    for (const auto& row : verify::lemma_A1()) {
        points += row.points;
        if (row.worst_slack > worst) worst = row.worst_slack, where = row.check + " at " + row.worst_point;
    }
    return {worst <= 1.0 + 1e-8, fmt("%zu bound evaluations, worst ratio %.6f (%s)", points, worst, where.c_str())};
}

Outcome series_vs_quadrature() {
    double worst = 0.0;
    std::size_t points = 0;
    for (double tau : {0.75, 0.9, 1.0})
        for (double y : steps(-5.0, 5.0, 0.05)) {
            const double quad = posterior_mean(y, {tau, 1.0});
            const double series = y * series_shrinkage_weight(y, tau, 1.0);
            const double rel = quad == 0.0 ? std::abs(series) : std::abs(series / quad - 1.0);
            worst = std::max(worst, rel);
            ++points;
        }
    return {worst <= 1e-8, fmt("%zu points, worst relative gap %.3e", points, worst)};
}

Outcome variance_vs_kappa_posterior() {
    double worst = 0.0;
    std::string where;
    for (double tau : {1.0, 0.5, 0.1, 0.01})
        for (int i = 0; i < 20; ++i) {
            const double y = 0.75 * i;
            const double gap =
                std::abs(posterior_variance(y, {tau, 1.0}) - oracle::kappa_posterior_moments(y, tau, 1.0).variance);
            if (gap > worst) worst = gap, where = fmt("y=%g tau=%g", y, tau);
        }
    return {worst <= 1e-6, fmt("20x4 grid, worst absolute gap %.3e (%s)", worst, where.c_str())};
}

Outcome bounded_shrinkage() {
    double worst = 0.0;
    std::string where;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const double zeta = shrinkage_gap_bound({tau, 1.0});
        for (double y : steps(-20.0, 20.0, 0.01)) {
            const double r = std::abs(posterior_mean(y, {tau, 1.0}) - y) / zeta;
            if (r > worst) worst = r, where = fmt("y=%g tau=%g", y, tau);
        }
    }
    return {worst <= 1.05, fmt("max |T - y| / zeta = %.4f (%s), allowed 1.05", worst, where.c_str())};
}

Outcome monotonicity() {
    const std::vector<double> taus{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 0.6, 1.0};
    const std::vector<double> ys = steps(-12.0, 11.88, 0.24);  // 100 values
    std::size_t bad_mono = 0, bad_shrink = 0;
    double worst_odd = 0.0;
    for (double y : ys) {
        double prev = 0.0;
        for (double tau : taus) {
            const double t = posterior_mean(y, {tau, 1.0});
            const double a = std::abs(t);
            if (a < prev * (1.0 - 1e-12)) ++bad_mono;
            if (a > std::abs(y)) ++bad_shrink;
            worst_odd = std::max(worst_odd, std::abs(t + posterior_mean(-y, {tau, 1.0})));
            prev = a;
        }
    }
    return {bad_mono == 0 && bad_shrink == 0 && worst_odd <= 1e-12,
            fmt("%zu points: %zu monotonicity and %zu |T|<=|y| violations, max |T(y)+T(-y)| %.1e",
                ys.size() * taus.size(), bad_mono, bad_shrink, worst_odd)};
}

Outcome risk_curve_shape() {
    std::vector<double> A;
    for (int a = 1; a <= 10; ++a) A.push_back(a);
    const auto report = risk_curve(400, 20, A, 1.0, {EbEstimator{2.0, 1.0, true}}, 100, cli::kDefaultSeed).front();
    const auto& c = report.per_cell;
    const auto peak = std::max_element(c.begin(), c.end(), [](auto& l, auto& r) { return l.mean_sse < r.mean_sse; });
    const bool peak_ok = peak->A == 3.0 || peak->A == 4.0;
    const auto& a4 = c[3];
    const auto& a10 = c[9];
    const bool sep = a10.mean_sse + 2.0 * a10.stderr_sse < a4.mean_sse - 2.0 * a4.stderr_sse;
    std::string curve;
    for (const auto& cell : c) curve += fmt("%s%.1f", curve.empty() ? "" : " ", cell.mean_sse);
    return {peak_ok && sep, fmt("peak at A=%g; A=4 %.1f+-%.1f, A=10 %.1f+-%.1f; curve [%s]", peak->A, a4.mean_sse,
                                a4.stderr_sse, a10.mean_sse, a10.stderr_sse, curve.c_str())};
}

Outcome eb_vs_full_bayes() {
    const std::size_t replicates = 100;
    Scenario s{400, 200, ConstantSignal{10.0}, 1.0, cli::kDefaultSeed};
    FullBayesEstimator fb;
    fb.gibbs.iterations = 6000;
    fb.gibbs.burn_in = 1000;
    const auto eb = replicated_risk(s, EbEstimator{}, replicates);
    const auto full = replicated_risk(s, fb, replicates);
    const bool sep = eb.mean_sse + 2.0 * eb.stderr_sse < full.mean_sse - 2.0 * full.stderr_sse;
    const bool above_one = full.tau_min > 1.0;
    return {sep && above_one,
            fmt("%zu replicates x 6000 iterations: eb %.1f+-%.1f, full Bayes %.1f+-%.1f; retained tau in [%.2f, %.2f]",
                replicates, eb.mean_sse, eb.stderr_sse, full.mean_sse, full.stderr_sse, full.tau_min, full.tau_max)};
}

Outcome rate_stability() {
    const auto rows = rate_scan({200, 400, 800}, PRule{}, OracleVariant::plain, 1.0, 100, cli::kDefaultSeed);
    double lo = HUGE_VAL, hi = 0.0;
    std::string ratios;
    for (const auto& r : rows) {
        const double ratio = r.mean_sse / (static_cast<double>(r.p) * std::log(static_cast<double>(r.n) / r.p));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ratios += fmt("%sn=%zu:%.3f", ratios.empty() ? "" : " ", r.n, ratio);
    }
    return {hi / lo < 4.0, fmt("ratios %s, spread %.3f", ratios.c_str(), hi / lo)};
}

Outcome chernoff_check() {
    const double freq = verify::monte_carlo_overshoot(400, 20, 10.0, 2.0, 1.5, 10000, cli::kDefaultSeed);
    const double bound = bounds::chernoff_tau_bound(400, 20, 2.0, 1.5);
    return {freq <= bound, fmt("Monte Carlo frequency %.3e, bound %.3e", freq, bound)};
}

Outcome asymptotics() {
    const HalfOrder ks[] = {HalfOrder::minus_half, HalfOrder::half, HalfOrder::three_halves};
    const double taus[] = {1e-3, 1e-4, 1e-5, 1e-6};
    bool pass = true;
    std::string detail;
    for (auto k : ks) {
        double prev = HUGE_VAL;
        detail += fmt("%sk=%g:", detail.empty() ? "" : "; ", to_double(k));
        for (double tau : taus) {
            const double y = shrinkage_gap_bound({tau, 1.0});
            const double err = std::abs(bounds::asymptotic_I(k, y, tau, 1.0) / integral_I(k, y, tau, 1.0).value() - 1.0);
            if (!(err < prev)) pass = false;
            prev = err;
            detail += fmt(" %.4f", err);
        }
        if (!(prev < 0.1)) pass = false;
    }
    return {pass, "relative errors over tau=1e-3..1e-6: " + detail};
}

// Runs the real binary twice per subcommand and compares bytes.
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "horseshoe_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto file = [&](const std::string& name) { return (dir / name).string(); };
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };

    {
        std::ofstream data(file("input.csv"));
        data << "y\n";
        const auto d = generate(Scenario{60, 6, ConstantSignal{5.0}, 1.0, 17}, 0);
        for (double v : d.y) data << csv::format(v) << '\n';
    }
    const std::string exe = HORSESHOE_CLI_PATH;
    const std::string in = file("input.csv");
    struct Case {
        std::string name;
        std::string args;
        std::vector<std::string> outputs;
    };
    std::vector<Case> cases;
    for (int run = 0; run < 2; ++run) {
        const std::string tag = std::to_string(run);
        cases.push_back({"estimate", "estimate --input " + in + " --output " + file("est" + tag + ".csv"),
                         {file("est" + tag + ".csv")}});
        cases.push_back({"simulate",
                         "simulate --n 60 --p 6 --A-range 2:5 --replicates 4 --estimators eb,oracle,full_bayes "
                         "--iterations 400 --burn-in 100 --seed 5 --output " + file("sim" + tag + ".csv"),
                         {file("sim" + tag + ".csv")}});
        cases.push_back({"gibbs",
                         "gibbs --input " + in + " --iterations 600 --burn-in 100 --seed 5 --output-prefix " +
                             file("gibbs" + tag),
                         {file("gibbs" + tag + "_theta_mean.csv"), file("gibbs" + tag + "_tau_samples.csv")}});
        cases.push_back({"verify", "verify --suite all --output " + file("verify" + tag + ".csv"),
                         {file("verify" + tag + ".csv")}});
        cases.push_back({"rates", "rates --n-list 100,200 --replicates 4 --seed 5 --output " + file("rates" + tag + ".csv"),
                         {file("rates" + tag + ".csv")}});
    }
    const std::size_t per_run = cases.size() / 2;
    std::string detail;
    bool pass = true;
    for (const auto& c : cases) {
        const int status = std::system((exe + " " + c.args + " >/dev/null 2>&1").c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            pass = false;
            detail += c.name + " exited nonzero; ";
        }
    }
    for (std::size_t i = 0; i < per_run; ++i) {
        const auto& a = cases[i];
        const auto& b = cases[i + per_run];
        bool same = true;
        for (std::size_t f = 0; f < a.outputs.size(); ++f) {
            const std::string x = slurp(a.outputs[f]);
            same = same && !x.empty() && x == slurp(b.outputs[f]);
        }
        pass = pass && same;
        detail += a.name + (same ? " identical" : " DIFFERS") + (i + 1 < per_run ? ", " : "");
    }
    fs::remove_all(dir);
    return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "integral bound certification", 10, integral_bounds},
        {2, "series vs quadrature posterior mean", 5, series_vs_quadrature},
        {3, "posterior variance vs kappa-posterior moments", 30, variance_vs_kappa_posterior},
        {4, "bounded shrinkage", 30, bounded_shrinkage},
        {5, "monotonicity, shrinkage, odd symmetry", 5, monotonicity},
        {6, "risk curve shape (n=400, p=20)", 300, risk_curve_shape},
        {7, "eb vs full Bayes at A=10, p=200", 900, eb_vs_full_bayes},
        {8, "rate stability", 300, rate_stability},
        {9, "Chernoff overshoot bound", 60, chernoff_check},
        {10, "small-tau asymptotics", 10, asymptotics},
        {11, "determinism of every subcommand", 60, determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::cout << fmt("criterion %2d %s  %-46s %8.2fs / %.0fs  ", c.id, pass ? "PASS" : "FAIL", c.title, secs,
                         c.limit_seconds)
                  << o.detail << (in_time ? "" : "  [over time limit]") << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
