#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/tau_selection.hpp"

namespace horseshoe {

// ---------------------------------------------------------------------------
// Seeds

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of one replicate in one cell:
///   splitmix64(splitmix64(splitmix64(base) ^ replicate) ^ cell).
/// Independent of thread count and execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replicate, std::uint64_t cell) noexcept {
    return splitmix64(splitmix64(splitmix64(base) ^ replicate) ^ cell);
}

// ---------------------------------------------------------------------------
// Scenarios

struct ConstantSignal {
    double A = 0.0;
};
using ExplicitSignal = std::vector<double>;

struct Scenario {
    std::size_t n = 400;
    std::size_t p = 20;
    std::variant<ConstantSignal, ExplicitSignal> signal = ConstantSignal{};
    double sigma = 1.0;
    std::uint64_t seed = 1;
    /// Cell index mixed into every replicate seed.
    std::uint64_t cell = 0;

    void validate() const {
        if (p > n) throw DomainError("Scenario: requires p <= n");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("Scenario: sigma must be positive");
        if (const auto* v = std::get_if<ExplicitSignal>(&signal)) {
            if (v->size() != n) throw DomainError("Scenario: explicit signal must have length n");
            const auto nonzero = static_cast<std::size_t>(
                std::count_if(v->begin(), v->end(), [](double t) { return t != 0.0; }));
            if (nonzero > p) throw DomainError("Scenario: explicit signal has more than p nonzeros");
        }
    }

    std::vector<double> theta0() const {
        if (const auto* v = std::get_if<ExplicitSignal>(&signal)) return *v;
        std::vector<double> t(n, 0.0);
        std::fill_n(t.begin(), p, std::get<ConstantSignal>(signal).A);
        return t;
    }
};

struct Draw {
    std::vector<double> y;
    std::vector<double> theta0;
};

/// y = theta0 + sigma z; a constant signal occupies the first p coordinates.
inline Draw generate(const Scenario& s, std::uint64_t replicate) {
    s.validate();
    Draw d;
    d.theta0 = s.theta0();
    std::mt19937_64 rng(derive_seed(s.seed, replicate, s.cell));
    std::normal_distribution<double> z(0.0, 1.0);
    d.y.resize(s.n);
    for (std::size_t i = 0; i < s.n; ++i) d.y[i] = d.theta0[i] + s.sigma * z(rng);
    return d;
}

// ---------------------------------------------------------------------------
// Estimators

struct EbEstimator {
    double c1 = 2.0;
    double c2 = 1.0;
    bool truncate = true;
};
struct OracleEstimator {
    OracleVariant variant = OracleVariant::plain;
};
struct FixedEstimator {
    double tau = 1.0;
};
struct FullBayesEstimator {
    GibbsConfig gibbs{.keep_theta = false};
};
using Estimator = std::variant<EbEstimator, OracleEstimator, FixedEstimator, FullBayesEstimator>;

inline std::string estimator_id(const Estimator& e) {
    struct Visitor {
        std::string operator()(const EbEstimator&) const { return "eb"; }
        std::string operator()(const OracleEstimator& o) const {
            return o.variant == OracleVariant::plain ? "oracle" : "oracle_log";
        }
        std::string operator()(const FixedEstimator&) const { return "fixed"; }
        std::string operator()(const FullBayesEstimator& f) const {
            return f.gibbs.tau_prior == TauPrior::half_cauchy ? "full_bayes" : "full_bayes_truncated";
        }
    };
    return std::visit(Visitor{}, e);
}

struct Estimate {
    std::vector<double> theta_hat;
    /// Plug-in tau, or the extreme retained tau draws for full Bayes.
    double tau_min = 0.0;
    double tau_max = 0.0;
};

/// Point estimate of theta from one data vector. `chain_seed` seeds the Gibbs
/// chain and is ignored by the plug-in estimators.
inline Estimate estimate_theta(std::span<const double> y, std::size_t p, double sigma,
                               const Estimator& est, std::uint64_t chain_seed,
                               const QuadratureSettings& settings = {}) {
    Estimate out;
    if (const auto* fb = std::get_if<FullBayesEstimator>(&est)) {
        GibbsConfig cfg = fb->gibbs;
        cfg.seed = chain_seed;
        GibbsTrace tr = gibbs_full_bayes(y, sigma, cfg);
        const auto [lo, hi] = std::minmax_element(tr.tau_samples.begin(), tr.tau_samples.end());
        out.tau_min = *lo;
        out.tau_max = *hi;
        out.theta_hat = std::move(tr.theta_mean);
        return out;
    }
    TauSource source;
    if (const auto* e = std::get_if<EbEstimator>(&est)) source = EbSource{e->c1, e->c2, e->truncate};
    else if (const auto* o = std::get_if<OracleEstimator>(&est)) source = OracleSource{y.size(), p, o->variant};
    else source = FixedSource{std::get<FixedEstimator>(est).tau};
    const double tau = resolve_tau(y, sigma, source);
    out.tau_min = out.tau_max = tau;
    out.theta_hat.reserve(y.size());
    const ShrinkageConfig cfg{tau, sigma};
    for (double v : y) out.theta_hat.push_back(posterior_mean(v, cfg, settings));
    return out;
}

// ---------------------------------------------------------------------------
// Risk

struct RiskCell {
    double A = 0.0;
    double mean_sse = 0.0;
    double stderr_sse = 0.0;
    std::size_t replicates = 0;
    double tau_min = 0.0;
    double tau_max = 0.0;
};

struct RiskReport {
    std::string estimator_id;
    std::size_t n = 0;
    std::size_t p = 0;
    double sigma = 1.0;
    std::uint64_t seed = 0;
    std::vector<RiskCell> per_cell;
};

/// Sum of squared errors for each replicate, in replicate order.
inline std::vector<double> replicate_sse(const Scenario& s, const Estimator& est, std::size_t replicates,
                                         std::vector<std::pair<double, double>>* tau_range = nullptr,
                                         const QuadratureSettings& settings = {}) {
    s.validate();
    if (replicates < 1) throw DomainError("replicated_risk: replicates must be >= 1");
    std::vector<double> sse(replicates);
    std::vector<std::pair<double, double>> taus(replicates);
    auto errors = parallel_for(replicates, [&](std::size_t r) {
        const Draw d = generate(s, r);
        // The chain gets its own stream, distinct from the data stream.
        const Estimate e = estimate_theta(d.y, s.p, s.sigma, est, splitmix64(derive_seed(s.seed, r, s.cell)),
                                          settings);
        double acc = 0.0;
        for (std::size_t i = 0; i < s.n; ++i) {
            const double diff = e.theta_hat[i] - d.theta0[i];
            acc += diff * diff;
        }
        sse[r] = acc;
        taus[r] = {e.tau_min, e.tau_max};
    });
    for (std::size_t r = 0; r < replicates; ++r) {
        if (!errors[r]) continue;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const std::exception& ex) {
            throw ReplicateFailure("replicate " + std::to_string(r) + " failed: " + ex.what(), r);
        }
    }
    if (tau_range) *tau_range = std::move(taus);
    return sse;
}

/// Mean and standard error (sample sd / sqrt(R)) of the replicate SSEs.
inline RiskCell replicated_risk(const Scenario& s, const Estimator& est, std::size_t replicates,
                                const QuadratureSettings& settings = {}) {
    std::vector<std::pair<double, double>> taus;
    const std::vector<double> sse = replicate_sse(s, est, replicates, &taus, settings);
    RiskCell cell;
    if (const auto* c = std::get_if<ConstantSignal>(&s.signal)) cell.A = c->A;
    cell.replicates = replicates;
    double sum = 0.0;
    for (double v : sse) sum += v;
    cell.mean_sse = sum / static_cast<double>(replicates);
    if (replicates > 1) {
        double ss = 0.0;
        for (double v : sse) ss += (v - cell.mean_sse) * (v - cell.mean_sse);
        cell.stderr_sse = std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates));
    }
    cell.tau_min = std::numeric_limits<double>::infinity();
    cell.tau_max = 0.0;
    for (const auto& [lo, hi] : taus) {
        cell.tau_min = std::min(cell.tau_min, lo);
        cell.tau_max = std::max(cell.tau_max, hi);
    }
    return cell;
}

/// Risk against A for each estimator. Cell i (the i-th A value) draws the
/// same data for every estimator.
inline std::vector<RiskReport> risk_curve(std::size_t n, std::size_t p, const std::vector<double>& A_values,
                                          double sigma, const std::vector<Estimator>& estimators,
                                          std::size_t replicates, std::uint64_t seed,
                                          const QuadratureSettings& settings = {}) {
    if (A_values.empty()) throw DomainError("risk_curve: no A values");
    std::vector<RiskReport> out;
    for (const Estimator& est : estimators) {
        RiskReport rep{estimator_id(est), n, p, sigma, seed, {}};
        for (std::size_t c = 0; c < A_values.size(); ++c) {
            Scenario s{n, p, ConstantSignal{A_values[c]}, sigma, seed, c};
            rep.per_cell.push_back(replicated_risk(s, est, replicates, settings));
        }
        out.push_back(std::move(rep));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rate scans

/// Number of nonzeros as a function of n.
struct PRule {
    enum class Kind { sqrt, constant, fraction } kind = Kind::sqrt;
    double value = 0.0;

    std::size_t operator()(std::size_t n) const {
        const double nd = static_cast<double>(n);
        switch (kind) {
            case Kind::sqrt: return static_cast<std::size_t>(std::ceil(std::sqrt(nd)));
            case Kind::constant: return static_cast<std::size_t>(value);
            case Kind::fraction: return static_cast<std::size_t>(std::ceil(value * nd));
        }
        return 0;
    }
};

struct RateRow {
    std::size_t n = 0;
    std::size_t p = 0;
    double tau = 0.0;
    double mean_sse = 0.0;
    double stderr_sse = 0.0;
    double reference_rate = 0.0;  // sigma^2 p log(n/p)
    double ratio = 0.0;
};

/// For each n: p = p_rule(n), tau = oracle_tau(n, p, variant), the first p
/// means equal to sqrt(2 sigma^2 log(n/p)) + signal_offset * sigma, and the
/// replicated SSE of the plug-in estimator divided by sigma^2 p log(n/p).
inline std::vector<RateRow> rate_scan(const std::vector<std::size_t>& n_values, const PRule& p_rule,
                                      OracleVariant variant, double sigma, std::size_t replicates,
                                      std::uint64_t seed, double signal_offset = 1.0,
                                      const QuadratureSettings& settings = {}) {
    std::vector<RateRow> rows;
    for (std::size_t c = 0; c < n_values.size(); ++c) {
        const std::size_t n = n_values[c];
        const std::size_t p = p_rule(n);
        if (p < 1 || p >= n) throw DomainError("rate_scan: p rule gives p outside [1, n) at n = " + std::to_string(n));
        const double ratio_np = static_cast<double>(n) / static_cast<double>(p);
        const double A = std::sqrt(2.0 * sigma * sigma * std::log(ratio_np)) + signal_offset * sigma;
        Scenario s{n, p, ConstantSignal{A}, sigma, seed, c};
        RiskCell cell = replicated_risk(s, OracleEstimator{variant}, replicates, settings);
        RateRow row;
        row.n = n;
        row.p = p;
        row.tau = oracle_tau(n, p, variant);
        row.mean_sse = cell.mean_sse;
        row.stderr_sse = cell.stderr_sse;
        row.reference_rate = sigma * sigma * static_cast<double>(p) * std::log(ratio_np);
        row.ratio = row.mean_sse / row.reference_rate;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace horseshoe
