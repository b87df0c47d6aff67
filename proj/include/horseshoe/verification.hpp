#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "horseshoe/bounds_oracle.hpp"
#include "horseshoe/errors.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/tau_selection.hpp"

// Certification grids for the closed-form bounds. Each check reduces to a
// slack ratio (computed / allowed); a check passes when its worst slack is
// at most 1 + tolerance.

namespace horseshoe::verify {

struct CheckRow {
    std::string suite;
    std::string check;
    std::size_t points = 0;
    double worst_slack = -std::numeric_limits<double>::infinity();
    double tolerance = 1e-8;
    std::string worst_point;

    CheckRow(std::string s, std::string c) : suite(std::move(s)), check(std::move(c)) {}

    bool pass() const { return points > 0 && worst_slack <= 1.0 + tolerance; }

    void record(double slack, const std::string& where) {
        ++points;
        if (!(slack <= worst_slack) || points == 1) {
            worst_slack = std::isnan(slack) ? std::numeric_limits<double>::infinity() : slack;
            worst_point = where;
        }
    }
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lemmaA1", "lemmaA2", "A4bounds", "asymptotics", "chernoff"};
    return names;
}

namespace detail {

inline std::string point(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ' ';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

inline const char* k_label(HalfOrder k) {
    switch (k) {
        case HalfOrder::minus_half: return "-1/2";
        case HalfOrder::half: return "1/2";
        case HalfOrder::three_halves: return "3/2";
    }
    return "?";
}

inline std::vector<double> steps(double lo, double hi, double step) {
    std::vector<double> v;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long i = 0; i <= count; ++i) v.push_back(lo + static_cast<double>(i) * step);
    return v;
}

}  // namespace detail

/// Bounds on I_k over tau in {1e-1, ..., 1e-4} x xi in {1, 5, 10, 25, 50}, a = 2.
inline std::vector<CheckRow> lemma_A1(const QuadratureSettings& settings = {}) {
    const double a = 2.0;
    std::vector<CheckRow> rows;
    for (auto b : bounds::kAllIntegralBounds) {
        CheckRow row{"lemmaA1", bounds::name_of(b)};
        for (double tau : {1e-1, 1e-2, 1e-3, 1e-4})
            for (double xi : {1.0, 5.0, 10.0, 25.0, 50.0}) {
                if (!bounds::applicable(b, tau, a)) continue;
                const double y = std::sqrt(2.0 * xi);
                const double bound = bounds::integral_bound(b, y, tau, 1.0, a);
                const double value = integral_I(bounds::order_of(b), y, tau, 1.0, settings).value();
                row.record(bounds::is_upper(b) ? value / bound : bound / value,
                           detail::point({{"tau", tau}, {"xi", xi}}));
            }
        rows.push_back(row);
    }
    return rows;
}

/// Upper bounds on the posterior mean and the two envelopes on f(tau).
inline std::vector<CheckRow> lemma_A2(const QuadratureSettings& settings = {}) {
    const double a = 2.0;
    CheckRow b1{"lemmaA2", "mean_bound_1"}, b2{"lemmaA2", "mean_bound_2"};
    for (double tau : {0.05, 0.01})
        for (double y : detail::steps(0.1, 6.0, 0.1)) {
            const double t = posterior_mean(y, {tau, 1.0}, settings);
            const auto mb = bounds::lemma_A2_mean_bounds(y, tau, 1.0, a);
            b1.record(t / mb.bound1, detail::point({{"tau", tau}, {"y", y}}));
            b2.record(t / mb.bound2, detail::point({{"tau", tau}, {"y", y}}));
        }
    CheckRow two_thirds{"lemmaA2", "f_le_two_thirds_tau"}, shafer{"lemmaA2", "f_le_shafer_envelope"};
    for (double tau : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
        const double f = bounds::mean_bound_f(tau);
        two_thirds.record(f / (2.0 / 3.0 * tau), detail::point({{"tau", tau}}));
        shafer.record(f / tau / (2.0 / 3.0 / (1.0 + tau)), detail::point({{"tau", tau}}));
    }
    return {b1, b2, two_thirds, shafer};
}

/// Posterior variance bounds, |T| <= |y|, and the bounded-shrinkage envelope
/// |T - y| <= 1.05 zeta_tau for small tau.
inline std::vector<CheckRow> A4_bounds(const QuadratureSettings& settings = {}) {
    CheckRow v1{"A4bounds", "variance_le_sigma2_plus_y2"}, v2{"A4bounds", "variance_le_mean_form"};
    CheckRow shrink{"A4bounds", "abs_mean_le_abs_y"};
    for (double sigma : {1.0, 2.0})
        for (double tau : {1.0, 0.5, 0.1, 0.01, 1e-3})
            for (double y : detail::steps(-10.0, 10.0, 0.25)) {
                const auto s = summarize(y * sigma, {tau, sigma}, settings);
                const double yy = y * sigma;
                const auto where = detail::point({{"sigma", sigma}, {"tau", tau}, {"y", yy}});
                v1.record(s.variance / (sigma * sigma + yy * yy), where);
                if (yy > 0.0) {
                    const double rhs = (sigma * sigma / yy + yy) * s.mean - s.mean * s.mean;
                    v2.record(s.variance / rhs, where);
                    shrink.record(std::abs(s.mean) / std::abs(yy), where);
                }
            }
    CheckRow gap{"A4bounds", "shrinkage_gap_1.05_zeta"};
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const ShrinkageConfig cfg{tau, 1.0};
        const double zeta = shrinkage_gap_bound(cfg);
        for (double y : detail::steps(0.0, 20.0, 0.05))
            gap.record(std::abs(posterior_mean(y, cfg, settings) - y) / (1.05 * zeta),
                       detail::point({{"tau", tau}, {"y", y}}));
    }
    return {v1, v2, shrink, gap};
}

/// Leading-order forms of I_k for small tau and the supporting constants.
inline std::vector<CheckRow> asymptotics(const QuadratureSettings& settings = {}) {
    const std::array<HalfOrder, 3> ks{HalfOrder::minus_half, HalfOrder::half, HalfOrder::three_halves};
    const std::array<double, 4> taus{1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<CheckRow> rows;
    std::array<std::array<double, 4>, 3> err{};
    for (std::size_t ki = 0; ki < ks.size(); ++ki)
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            const double tau = taus[ti];
            const double y = shrinkage_gap_bound({tau, 1.0});
            const double exact = integral_I(ks[ki], y, tau, 1.0, settings).value();
            err[ki][ti] = std::abs(bounds::asymptotic_I(ks[ki], y, tau, 1.0) / exact - 1.0);
        }
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        CheckRow row{"asymptotics", std::string("rel_error_k=") + detail::k_label(ks[ki]) + "_tau=1e-6_lt_0.1"};
        row.record(err[ki][3] / 0.1, detail::point({{"k", to_double(ks[ki])}, {"tau", 1e-6}}));
        rows.push_back(row);
    }
    CheckRow mono{"asymptotics", "rel_error_decreasing_in_tau"};
    for (std::size_t ki = 0; ki < ks.size(); ++ki)
        for (std::size_t ti = 1; ti < taus.size(); ++ti)
            mono.record(err[ki][ti] / err[ki][ti - 1],
                        detail::point({{"k", to_double(ks[ki])}, {"tau", taus[ti]}}));
    rows.push_back(mono);

    CheckRow pi{"asymptotics", "improper_constant_eq_pi"};
    pi.record(std::abs(bounds::improper_constant() - std::numbers::pi) / 1e-10, "");
    rows.push_back(pi);

    // y |ratio - 1| should settle to a constant; require the spread over
    // y in {20, 40, 80} to stay within 25%.
    CheckRow tail{"asymptotics", "incomplete_exp_ratio_C_over_y"};
    for (double k : {-0.5, 0.5, 1.5}) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double y : {20.0, 40.0, 80.0}) {
            const double c = y * std::abs(bounds::incomplete_exp_ratio(k, y) - 1.0);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        tail.record(hi / lo / 1.25, detail::point({{"k", k}}));
    }
    rows.push_back(tail);
    return rows;
}

/// Probability that the counting estimator overshoots p/n, estimated by
/// Monte Carlo with the first p means at `signal` and the rest zero.
inline double monte_carlo_overshoot(std::size_t n, std::size_t p, double signal, double c1, double c2,
                                    std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> y(n);
    const double target = static_cast<double>(p) / static_cast<double>(n);
    std::size_t hits = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        for (std::size_t i = 0; i < n; ++i) y[i] = (i < p ? signal : 0.0) + z(rng);
        if (empirical_bayes_tau(y, 1.0, c1, c2, true).raw_value > target) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

inline std::vector<CheckRow> chernoff(std::size_t draws = 10000, std::uint64_t seed = 8) {
    CheckRow mills{"chernoff", "q_n_le_mills_bound"};
    for (double c1 : {2.0, 3.0})
        for (std::size_t n : {50, 100, 400, 1000, 10000, 100000})
            mills.record(bounds::exceedance_probability(n, c1) / bounds::exceedance_mills_bound(n, c1),
                         detail::point({{"n", static_cast<double>(n)}, {"c1", c1}}));
    CheckRow mono{"chernoff", "bound_nonincreasing_in_p"};
    for (std::size_t p = 1; p < 60; ++p) {
        const double lo = bounds::chernoff_tau_bound(400, p + 1, 2.0, 1.5);
        const double hi = bounds::chernoff_tau_bound(400, p, 2.0, 1.5);
        mono.record(hi > 0.0 ? lo / hi : 0.0, detail::point({{"p", static_cast<double>(p)}}));
    }
    CheckRow mc{"chernoff", "monte_carlo_le_bound"};
    const double bound = bounds::chernoff_tau_bound(400, 20, 2.0, 1.5);
    const double freq = monte_carlo_overshoot(400, 20, 10.0, 2.0, 1.5, draws, seed);
    mc.record(freq / bound, detail::point({{"n", 400}, {"p", 20}, {"freq", freq}, {"bound", bound}}));
    return {mills, mono, mc};
}

inline std::vector<CheckRow> run_suite(const std::string& name, const QuadratureSettings& settings = {}) {
    if (name == "lemmaA1") return lemma_A1(settings);
    if (name == "lemmaA2") return lemma_A2(settings);
    if (name == "A4bounds") return A4_bounds(settings);
    if (name == "asymptotics") return asymptotics(settings);
    if (name == "chernoff") return chernoff();
    if (name == "all") {
        std::vector<CheckRow> all;
        for (const auto& s : suite_names()) {
            auto part = run_suite(s, settings);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw DomainError("unknown verification suite '" + name + "'");
}

}  // namespace horseshoe::verify
