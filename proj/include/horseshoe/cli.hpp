#pragma once

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "horseshoe/csv.hpp"
#include "horseshoe/errors.hpp"
#include "horseshoe/experiments.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/tau_selection.hpp"
#include "horseshoe/verification.hpp"

// Command-line front end. Exit codes: 0 success, 1 verification failure,
// 2 usage or input error, 3 numerical failure.

namespace horseshoe::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2, kNumericalFailure = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Raised for malformed flag values that CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double to_number(const std::string& s, const std::string& what) {
    try {
        return csv::parse_double(s, 0);
    } catch (const csv::ParseError&) {
        throw UsageError(what + ": not a number '" + s + "'");
    }
}

inline std::size_t to_count(const std::string& s, const std::string& what) {
    const double v = to_number(s, what);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw UsageError(what + ": not a count '" + s + "'");
    return static_cast<std::size_t>(v);
}

// eb | oracle:n:p[:log] | fixed:v
inline TauSource parse_tau(const std::string& spec, double c1, double c2, bool truncate) {
    const auto parts = split(spec, ':');
    if (parts.empty()) throw UsageError("--tau: empty value");
    if (parts[0] == "eb" && parts.size() == 1) return EbSource{c1, c2, truncate};
    if (parts[0] == "fixed" && parts.size() == 2) return FixedSource{to_number(parts[1], "--tau")};
    if (parts[0] == "oracle" && (parts.size() == 3 || parts.size() == 4)) {
        OracleSource s{to_count(parts[1], "--tau"), to_count(parts[2], "--tau"), OracleVariant::plain};
        if (parts.size() == 4) {
            if (parts[3] != "log") throw UsageError("--tau: expected 'log' as the fourth field");
            s.variant = OracleVariant::log_corrected;
        }
        return s;
    }
    throw UsageError("--tau: expected eb, oracle:n:p[:log] or fixed:v, got '" + spec + "'");
}

// lo:hi[:step] or a comma list.
inline std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        const auto parts = split(spec, ':');
        if (parts.size() < 2 || parts.size() > 3) throw UsageError("--A-range: expected lo:hi[:step]");
        const double lo = to_number(parts[0], "--A-range");
        const double hi = to_number(parts[1], "--A-range");
        const double step = parts.size() == 3 ? to_number(parts[2], "--A-range") : 1.0;
        if (!(step > 0.0) || hi < lo) throw UsageError("--A-range: need lo <= hi and step > 0");
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
        for (const auto& f : split(spec, ',')) out.push_back(to_number(f, "--A-range"));
    }
    if (out.empty()) throw UsageError("--A-range: no values");
    return out;
}

inline std::vector<Estimator> parse_estimators(const std::string& spec, double c1, double c2, bool truncate,
                                               const GibbsConfig& gibbs) {
    std::vector<Estimator> out;
    for (const auto& tok : split(spec, ',')) {
        if (tok == "eb") out.push_back(EbEstimator{c1, c2, truncate});
        else if (tok == "oracle") out.push_back(OracleEstimator{OracleVariant::plain});
        else if (tok == "oracle_log") out.push_back(OracleEstimator{OracleVariant::log_corrected});
        else if (tok.rfind("fixed:", 0) == 0) {
            const double tau = to_number(tok.substr(6), "--estimators");
            if (!(tau > 0.0 && tau <= 1.0)) throw UsageError("--estimators: fixed tau must lie in (0, 1]");
            out.push_back(FixedEstimator{tau});
        }
        else if (tok == "full_bayes" || tok == "full_bayes_truncated") {
            FullBayesEstimator fb{gibbs};
            fb.gibbs.keep_theta = false;
            fb.gibbs.tau_prior = tok == "full_bayes" ? TauPrior::half_cauchy : TauPrior::half_cauchy_truncated;
            out.push_back(fb);
        } else {
            throw UsageError("--estimators: unknown estimator '" + tok + "'");
        }
    }
    if (out.empty()) throw UsageError("--estimators: none given");
    return out;
}

inline PRule parse_p_rule(const std::string& spec) {
    if (spec == "sqrt") return {PRule::Kind::sqrt, 0.0};
    const auto parts = split(spec, ':');
    if (parts.size() == 2 && parts[0] == "constant") return {PRule::Kind::constant, static_cast<double>(to_count(parts[1], "--p-rule"))};
    if (parts.size() == 2 && parts[0] == "fraction") return {PRule::Kind::fraction, to_number(parts[1], "--p-rule")};
    throw UsageError("--p-rule: expected sqrt, constant:k or fraction:f, got '" + spec + "'");
}

inline std::vector<double> read_input(const std::string& path) {
    if (path == "-") return csv::read_y_column(std::cin);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input '" + path + "'");
    return csv::read_y_column(in);
}

inline void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open output '" + path + "'");
    f << content;
    if (!f) throw UsageError("failed writing '" + path + "'");
}

}  // namespace detail

/// Parses argv and runs one subcommand. Output CSVs go to files or, for
/// "-", to `out`; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Horseshoe estimator toolkit: posterior summaries, tau selection, simulation and bound checks"};
    app.require_subcommand(1);
    int code = kSuccess;

    // estimate
    struct {
        std::string input, output = "-", tau = "eb";
        double sigma = 1.0, c1 = 2.0, c2 = 1.0;
        bool no_truncate = false;
    } est;
    auto* estimate = app.add_subcommand("estimate", "Posterior mean, variance and weight for each y");
    estimate->add_option("--input", est.input, "CSV with a single column 'y' ('-' for stdin)")->required();
    estimate->add_option("--output", est.output, "Output CSV ('-' for stdout)");
    estimate->add_option("--sigma", est.sigma, "Noise standard deviation")->capture_default_str();
    estimate->add_option("--tau", est.tau, "eb | oracle:n:p[:log] | fixed:v")->capture_default_str();
    estimate->add_option("--c1", est.c1, "Threshold constant of the counting estimator")->capture_default_str();
    estimate->add_option("--c2", est.c2, "Divisor constant of the counting estimator")->capture_default_str();
    estimate->add_flag("--no-truncate", est.no_truncate, "Do not floor the counting estimate at 1/n");

    // simulate
    struct {
        std::size_t n = 400, p = 20, replicates = 100, iterations = 6000, burn_in = 1000;
        std::string a_range = "1:10", estimators = "eb,full_bayes", output = "-";
        double sigma = 1.0, c1 = 2.0, c2 = 1.0;
        std::uint64_t seed = kDefaultSeed;
    } sim;
    auto* simulate = app.add_subcommand("simulate", "Replicated risk against signal strength A");
    simulate->add_option("--n", sim.n, "Dimension")->capture_default_str();
    simulate->add_option("--p", sim.p, "Number of nonzero means")->capture_default_str();
    simulate->add_option("--A-range", sim.a_range, "lo:hi[:step] or a comma list")->capture_default_str();
    simulate->add_option("--sigma", sim.sigma, "Noise standard deviation")->capture_default_str();
    simulate->add_option("--estimators", sim.estimators,
                         "Comma list of eb, oracle, oracle_log, fixed:v, full_bayes, full_bayes_truncated")
        ->capture_default_str();
    simulate->add_option("--replicates", sim.replicates, "Replicates per cell")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    simulate->add_option("--c1", sim.c1, "eb threshold constant")->capture_default_str();
    simulate->add_option("--c2", sim.c2, "eb divisor constant")->capture_default_str();
    simulate->add_option("--iterations", sim.iterations, "Gibbs iterations for full Bayes arms")->capture_default_str();
    simulate->add_option("--burn-in", sim.burn_in, "Gibbs burn-in for full Bayes arms")->capture_default_str();
    simulate->add_option("--output", sim.output, "Output CSV ('-' for stdout)");

    // gibbs
    struct {
        std::string input, prefix, tau_prior = "half_cauchy";
        double sigma = 1.0;
        std::size_t iterations = 6000, burn_in = 1000;
        std::uint64_t seed = kDefaultSeed;
    } gib;
    auto* gibbs = app.add_subcommand("gibbs", "Full Bayes Gibbs sampler with a half-Cauchy prior on tau");
    gibbs->add_option("--input", gib.input, "CSV with a single column 'y'")->required();
    gibbs->add_option("--sigma", gib.sigma, "Noise standard deviation")->capture_default_str();
    gibbs->add_option("--iterations", gib.iterations, "Total iterations")->capture_default_str();
    gibbs->add_option("--burn-in", gib.burn_in, "Discarded leading iterations")->capture_default_str();
    gibbs->add_option("--seed", gib.seed, "Chain seed")->capture_default_str();
    gibbs->add_option("--tau-prior", gib.tau_prior, "half_cauchy | truncated")
        ->check(CLI::IsMember({"half_cauchy", "truncated"}))
        ->capture_default_str();
    gibbs->add_option("--output-prefix", gib.prefix, "Writes <prefix>_theta_mean.csv and <prefix>_tau_samples.csv")
        ->required();

    // verify
    std::string suite = "all", verify_output = "-";
    auto* verify = app.add_subcommand("verify", "Certify the closed-form bounds on computed quantities");
    verify->add_option("--suite", suite, "lemmaA1 | lemmaA2 | A4bounds | asymptotics | chernoff | all")
        ->capture_default_str();
    verify->add_option("--output", verify_output, "Output CSV ('-' for stdout)");

    // rates
    struct {
        std::string n_list = "200,400,800", p_rule = "sqrt", variant = "plain", output = "-";
        std::size_t replicates = 100;
        double sigma = 1.0, offset = 1.0;
        std::uint64_t seed = kDefaultSeed;
    } rt;
    auto* rates = app.add_subcommand("rates", "Risk over p log(n/p) across n");
    rates->add_option("--n-list", rt.n_list, "Comma list of n")->capture_default_str();
    rates->add_option("--p-rule", rt.p_rule, "sqrt | constant:k | fraction:f")->capture_default_str();
    rates->add_option("--tau-variant", rt.variant, "plain | log")
        ->check(CLI::IsMember({"plain", "log"}))
        ->capture_default_str();
    rates->add_option("--replicates", rt.replicates, "Replicates per n")->capture_default_str();
    rates->add_option("--sigma", rt.sigma, "Noise standard deviation")->capture_default_str();
    rates->add_option("--signal-offset", rt.offset, "Signal = sqrt(2 sigma^2 log(n/p)) + offset * sigma")
        ->capture_default_str();
    rates->add_option("--seed", rt.seed, "Base seed")->capture_default_str();
    rates->add_option("--output", rt.output, "Output CSV ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        std::ostringstream buf;
        csv::RowWriter row(buf);

        if (*estimate) {
            const auto ys = detail::read_input(est.input);
            if (ys.empty()) throw UsageError("input has no rows");
            const auto source = detail::parse_tau(est.tau, est.c1, est.c2, !est.no_truncate);
            const double tau = resolve_tau(ys, est.sigma, source);
            const auto summaries = summarize(ys, ShrinkageConfig{tau, est.sigma});
            buf << "# tau=" << csv::format(tau) << '\n';
            row << "y" << "posterior_mean" << "posterior_variance" << "shrinkage_weight";
            row.end();
            for (std::size_t i = 0; i < ys.size(); ++i) {
                row << ys[i] << summaries[i].mean << summaries[i].variance << summaries[i].shrinkage_weight;
                row.end();
            }
            detail::write_output(est.output, buf.str(), out);
        } else if (*simulate) {
            if (sim.p > sim.n || sim.n == 0) throw UsageError("--p must not exceed --n");
            if (sim.replicates < 1) throw UsageError("--replicates must be >= 1");
            if (!(sim.sigma > 0.0)) throw UsageError("--sigma must be positive");
            if (sim.iterations <= sim.burn_in) throw UsageError("--iterations must exceed --burn-in");
            GibbsConfig g;
            g.iterations = sim.iterations;
            g.burn_in = sim.burn_in;
            const auto A = detail::parse_range(sim.a_range);
            const auto estimators = detail::parse_estimators(sim.estimators, sim.c1, sim.c2, true, g);
            for (const auto& e : estimators)
                if (std::holds_alternative<OracleEstimator>(e) && (sim.p < 1 || sim.p >= sim.n))
                    throw UsageError("oracle estimators need 1 <= p < n");
            const auto reports = risk_curve(sim.n, sim.p, A, sim.sigma, estimators, sim.replicates, sim.seed);
            row << "estimator" << "n" << "p" << "sigma" << "A" << "replicates" << "mean_sse" << "stderr_sse"
                << "seed";
            row.end();
            for (const auto& rep : reports)
                for (const auto& c : rep.per_cell) {
                    row << rep.estimator_id << rep.n << rep.p << rep.sigma << c.A << c.replicates << c.mean_sse
                        << c.stderr_sse << rep.seed;
                    row.end();
                }
            detail::write_output(sim.output, buf.str(), out);
        } else if (*gibbs) {
            const auto ys = detail::read_input(gib.input);
            if (ys.empty()) throw UsageError("input has no rows");
            GibbsConfig cfg;
            cfg.iterations = gib.iterations;
            cfg.burn_in = gib.burn_in;
            cfg.seed = gib.seed;
            cfg.keep_theta = false;
            cfg.tau_prior = gib.tau_prior == "half_cauchy" ? TauPrior::half_cauchy : TauPrior::half_cauchy_truncated;
            const GibbsTrace tr = gibbs_full_bayes(ys, gib.sigma, cfg);
            row << "y" << "theta_mean";
            row.end();
            for (std::size_t i = 0; i < ys.size(); ++i) {
                row << ys[i] << tr.theta_mean[i];
                row.end();
            }
            detail::write_output(gib.prefix + "_theta_mean.csv", buf.str(), out);
            std::ostringstream tbuf;
            csv::RowWriter trow(tbuf);
            trow << "tau";
            trow.end();
            for (double t : tr.tau_samples) {
                trow << t;
                trow.end();
            }
            detail::write_output(gib.prefix + "_tau_samples.csv", tbuf.str(), out);
        } else if (*verify) {
            if (suite != "all" && std::find(verify::suite_names().begin(), verify::suite_names().end(), suite) ==
                                      verify::suite_names().end())
                throw UsageError("--suite: unknown suite '" + suite + "'");
            const auto checks = verify::run_suite(suite);
            row << "suite" << "check" << "points" << "worst_slack" << "tolerance" << "pass" << "worst_point";
            row.end();
            for (const auto& c : checks) {
                row << c.suite << c.check << c.points << c.worst_slack << c.tolerance << (c.pass() ? "1" : "0")
                    << c.worst_point;
                row.end();
                if (!c.pass()) {
                    err << "FAIL " << c.suite << '/' << c.check << " slack " << c.worst_slack << " at "
                        << c.worst_point << '\n';
                    code = kVerificationFailed;
                }
            }
            detail::write_output(verify_output, buf.str(), out);
        } else if (*rates) {
            std::vector<std::size_t> ns;
            for (const auto& f : detail::split(rt.n_list, ',')) ns.push_back(detail::to_count(f, "--n-list"));
            if (ns.empty()) throw UsageError("--n-list: no values");
            if (rt.replicates < 1) throw UsageError("--replicates must be >= 1");
            const auto variant = rt.variant == "plain" ? OracleVariant::plain : OracleVariant::log_corrected;
            const auto table = rate_scan(ns, detail::parse_p_rule(rt.p_rule), variant, rt.sigma, rt.replicates,
                                         rt.seed, rt.offset);
            row << "n" << "p" << "tau" << "mean_sse" << "reference_rate" << "ratio";
            row.end();
            for (const auto& r : table) {
                row << r.n << r.p << r.tau << r.mean_sse << r.reference_rate << r.ratio;
                row.end();
            }
            detail::write_output(rt.output, buf.str(), out);
        }
    } catch (const csv::ParseError& e) {
        err << "error: input " << e.what() << '\n';
        return kUsageError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DegenerateEstimate& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const SamplerDivergence& e) {
        err << "numerical failure: " << e.what() << " (iteration " << e.iteration() << ")\n";
        return kNumericalFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return code;
}

}  // namespace horseshoe::cli
