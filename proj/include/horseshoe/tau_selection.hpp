#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/quadrature.hpp"

namespace horseshoe {

struct TauEstimate {
    double value = 1.0;
    /// Number of |y_i| at or above the threshold sqrt(c1 sigma^2 log n).
    std::size_t raw_count = 0;
    /// True when the 1/n floor was applied.
    bool truncated = false;
    /// count / (c2 n), before any floor or cap.
    double raw_value = 0.0;
};

/// Counting estimator  #{|y_i| >= sqrt(c1 sigma^2 log n)} / (c2 n),
/// floored at 1/n when `truncate` is set and capped at 1.
inline TauEstimate empirical_bayes_tau(std::span<const double> y, double sigma, double c1 = 2.0,
                                       double c2 = 1.0, bool truncate = true) {
    const std::size_t n = y.size();
    if (n == 0) throw DomainError("empirical_bayes_tau: empty data");
    if (!(sigma > 0.0)) throw DomainError("empirical_bayes_tau: sigma must be positive");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("empirical_bayes_tau: c1, c2 must be positive");

    const double nd = static_cast<double>(n);
    const double threshold = std::sqrt(c1 * sigma * sigma * std::log(nd));
    TauEstimate est;
    est.raw_count = static_cast<std::size_t>(
        std::count_if(y.begin(), y.end(), [&](double v) { return std::abs(v) >= threshold; }));
    est.raw_value = static_cast<double>(est.raw_count) / (c2 * nd);

    if (truncate) {
        est.truncated = est.raw_value < 1.0 / nd;
        est.value = std::min(1.0, std::max(est.raw_value, 1.0 / nd));
    } else {
        if (est.raw_count == 0)
            throw DegenerateEstimate("empirical_bayes_tau: no observation exceeds the threshold "
                                     "and truncation is disabled");
        est.value = std::min(1.0, est.raw_value);
    }
    return est;
}

enum class OracleVariant { plain, log_corrected };

/// p/n, or (p/n) sqrt(log(n/p)) for the log-corrected variant; capped at 1.
inline double oracle_tau(std::size_t n, std::size_t p, OracleVariant variant) {
    if (p < 1 || p >= n) throw DomainError("oracle_tau: requires 1 <= p < n");
    const double ratio = static_cast<double>(p) / static_cast<double>(n);
    const double tau =
        variant == OracleVariant::plain ? ratio : ratio * std::sqrt(std::log(1.0 / ratio));
    return std::min(1.0, tau);
}

// ---------------------------------------------------------------------------
// Full Bayes

enum class TauPrior { half_cauchy, half_cauchy_truncated };

struct GibbsConfig {
    std::size_t iterations = 6000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 1;
    TauPrior tau_prior = TauPrior::half_cauchy;
    bool keep_theta = true;
    bool keep_lambda = false;
    /// Plain rejection attempts per iteration for the truncated prior.
    int truncation_retries = 100;
};

/// Retained draws of a single chain. Matrices are row-major, one row per
/// retained iteration.
struct GibbsTrace {
    std::size_t n = 0;
    std::size_t iterations = 0;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    std::vector<double> theta_samples;   // retained x n, empty unless keep_theta
    std::vector<double> lambda_samples;  // retained x n, empty unless keep_lambda
    std::vector<double> tau_samples;     // retained
    std::vector<double> theta_mean;      // n, column means of the retained theta draws

    std::size_t retained() const noexcept { return iterations - burn_in; }
    double theta(std::size_t draw, std::size_t i) const { return theta_samples[draw * n + i]; }
};

namespace detail {

// InvGamma(shape, scale) with density proportional to x^{-shape-1} exp(-scale / x).
template <class Rng>
double inverse_gamma(Rng& rng, double shape, double scale) {
    std::gamma_distribution<double> g(shape, 1.0);
    return scale / g(rng);
}

// Gamma(shape, 1) conditioned on G >= lower. Plain rejection when the bound
// sits in the bulk (at most `retries` tries); otherwise a shifted
// exponential proposal lower + Exp(rate) with rate = 1 - (shape - 1) / lower,
// which is exact and stays efficient however far into the tail `lower` is.
template <class Rng>
double gamma_lower_truncated(Rng& rng, double shape, double lower, int retries, std::size_t iteration) {
    if (lower <= shape) {
        std::gamma_distribution<double> g(shape, 1.0);
        for (int attempt = 0; attempt < retries; ++attempt) {
            const double draw = g(rng);
            if (draw >= lower) return draw;
        }
        throw SamplerDivergence("gibbs: truncated tau draw rejected " + std::to_string(retries) +
                                    " times at iteration " + std::to_string(iteration),
                                iteration);
    }
    const double rate = 1.0 - (shape - 1.0) / lower;
    std::exponential_distribution<double> e(rate);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 100 * retries; ++attempt) {
        const double x = lower + e(rng);
        // log of g(x) / (M h(x)), maximal (= 0) at x = lower.
        const double r = x / lower;
        const double log_accept = (shape - 1.0) * (std::log(r) - (r - 1.0));
        if (std::log(u(rng)) <= log_accept) return x;
    }
    throw SamplerDivergence("gibbs: truncated tau tail sampler failed at iteration " +
                                std::to_string(iteration),
                            iteration);
}

}  // namespace detail

/// One draw of theta_i | lambda_i, tau, y_i ~ N((1 - kappa) y, sigma^2 (1 - kappa)),
/// kappa = 1 / (1 + tau^2 lambda^2). Exposed for validating the sampler's
/// conditional on its own.
template <class Rng>
double sample_theta_conditional(Rng& rng, double y, double sigma, double tau2, double lambda2) {
    const double s = tau2 * lambda2;
    const double one_minus_kappa = s / (1.0 + s);
    std::normal_distribution<double> z(0.0, 1.0);
    return one_minus_kappa * y + sigma * std::sqrt(one_minus_kappa) * z(rng);
}

/// Gibbs sampler for the horseshoe with a half-Cauchy prior on tau and sigma
/// known. Both half-Cauchy layers (lambda_i and tau) are written as
/// inverse-gamma scale mixtures with auxiliaries nu_i and eta:
///   lambda_i^2 | nu_i ~ IG(1/2, 1/nu_i),  nu_i ~ IG(1/2, 1),
///   tau^2 | eta ~ IG(1/2, 1/eta),         eta ~ IG(1/2, 1),
/// which gives closed-form full conditionals for every block. The truncated
/// prior restricts tau to (0, 1]; its tau^2 conditional is the inverse gamma
/// above restricted to (0, 1], sampled exactly.
inline GibbsTrace gibbs_full_bayes(std::span<const double> y, double sigma,
                                   const GibbsConfig& cfg = {}) {
    if (!(cfg.iterations > cfg.burn_in)) throw DomainError("gibbs: iterations must exceed burn_in");
    if (!(sigma > 0.0)) throw DomainError("gibbs: sigma must be positive");
    const std::size_t n = y.size();
    if (n == 0) throw DomainError("gibbs: empty data");

    std::mt19937_64 rng(cfg.seed);
    const double sigma2 = sigma * sigma;

    std::vector<double> theta(y.begin(), y.end());
    std::vector<double> lambda2(n, 1.0);
    std::vector<double> nu(n, 1.0);
    double tau2 = 1.0;
    double eta = 1.0;

    GibbsTrace trace;
    trace.n = n;
    trace.iterations = cfg.iterations;
    trace.burn_in = cfg.burn_in;
    trace.seed = cfg.seed;
    const std::size_t kept = cfg.iterations - cfg.burn_in;
    trace.tau_samples.reserve(kept);
    if (cfg.keep_theta) trace.theta_samples.reserve(kept * n);
    if (cfg.keep_lambda) trace.lambda_samples.reserve(kept * n);
    trace.theta_mean.assign(n, 0.0);

    auto diverged = [](std::size_t it, const char* what) {
        return SamplerDivergence(std::string("gibbs: non-finite ") + what + " at iteration " +
                                     std::to_string(it),
                                 it);
    };

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            theta[i] = sample_theta_conditional(rng, y[i], sigma, tau2, lambda2[i]);
            if (!std::isfinite(theta[i])) throw diverged(it, "theta");
        }

        double sum_scaled = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t2 = theta[i] * theta[i] / (2.0 * sigma2);
            lambda2[i] = detail::inverse_gamma(rng, 1.0, 1.0 / nu[i] + t2 / tau2);
            nu[i] = detail::inverse_gamma(rng, 1.0, 1.0 + 1.0 / lambda2[i]);
            if (!std::isfinite(lambda2[i]) || !(lambda2[i] > 0.0) || !std::isfinite(nu[i]))
                throw diverged(it, "lambda");
            sum_scaled += t2 / lambda2[i];
        }

        const double shape = 0.5 * (static_cast<double>(n) + 1.0);
        const double scale = 1.0 / eta + sum_scaled;
        if (cfg.tau_prior == TauPrior::half_cauchy) {
            tau2 = detail::inverse_gamma(rng, shape, scale);
        } else {
            // tau^2 = scale / G <= 1  <=>  G >= scale.
            const double g = detail::gamma_lower_truncated(rng, shape, scale, cfg.truncation_retries, it);
            tau2 = std::min(1.0, scale / g);
        }
        eta = detail::inverse_gamma(rng, 1.0, 1.0 + 1.0 / tau2);
        if (!std::isfinite(tau2) || !(tau2 > 0.0) || !std::isfinite(eta)) throw diverged(it, "tau");

        if (it >= cfg.burn_in) {
            trace.tau_samples.push_back(std::sqrt(tau2));
            for (std::size_t i = 0; i < n; ++i) trace.theta_mean[i] += theta[i];
            if (cfg.keep_theta) trace.theta_samples.insert(trace.theta_samples.end(), theta.begin(), theta.end());
            if (cfg.keep_lambda)
                for (double l2 : lambda2) trace.lambda_samples.push_back(std::sqrt(l2));
        }
    }
    for (double& m : trace.theta_mean) m /= static_cast<double>(kept);
    return trace;
}

// ---------------------------------------------------------------------------
// Plug-in estimation

struct EbSource {
    double c1 = 2.0;
    double c2 = 1.0;
    bool truncate = true;
};
struct OracleSource {
    std::size_t n = 0;
    std::size_t p = 0;
    OracleVariant variant = OracleVariant::plain;
};
struct FixedSource {
    double tau = 1.0;
};
using TauSource = std::variant<EbSource, OracleSource, FixedSource>;

inline double resolve_tau(std::span<const double> y, double sigma, const TauSource& source) {
    struct Visitor {
        std::span<const double> y;
        double sigma;
        double operator()(const EbSource& s) const {
            return empirical_bayes_tau(y, sigma, s.c1, s.c2, s.truncate).value;
        }
        double operator()(const OracleSource& s) const { return oracle_tau(s.n, s.p, s.variant); }
        double operator()(const FixedSource& s) const {
            check_tau_sigma(s.tau, sigma);
            return s.tau;
        }
    };
    return std::visit(Visitor{y, sigma}, source);
}

/// Resolves tau once from `source` and summarizes every coordinate with it.
inline std::vector<PosteriorSummary> plugin_estimate(std::span<const double> y, double sigma,
                                                     const TauSource& source,
                                                     const QuadratureSettings& settings = {}) {
    const double tau = resolve_tau(y, sigma, source);
    return summarize(y, ShrinkageConfig{tau, sigma}, settings);
}

}  // namespace horseshoe
