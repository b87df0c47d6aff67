#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "horseshoe/errors.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/quadrature.hpp"
#include "horseshoe/special_functions.hpp"

// Closed-form bounds and rates for the horseshoe estimator, evaluated
// numerically so the inequalities can be checked against computed integrals.
// Rates drop unspecified multiplicative constants.

namespace horseshoe::bounds {

struct RateInputs {
    std::size_t n = 0;
    std::size_t p = 0;
    double tau = 0.0;
    double sigma = 1.0;

    void validate() const {
        if (p < 1 || p >= n) throw DomainError("RateInputs: requires 1 <= p < n");
        if (!(tau > 0.0 && tau < 1.0)) throw DomainError("RateInputs: requires tau in (0, 1)");
        if (!(sigma > 0.0)) throw DomainError("RateInputs: sigma must be positive");
    }
};

// ---------------------------------------------------------------------------
// Bounds on I_k

/// The five displayed bounds on I_k, in order: lower on I_{3/2}, lower and
/// upper on I_{1/2}, lower and upper on I_{-1/2}.
enum class IntegralBound {
    lower_three_halves,  // tau < 1/sqrt(a)
    lower_half,          // tau < 1
    upper_half,          // tau < 1/sqrt(a)
    lower_minus_half,    // tau < 1/a
    upper_minus_half,    // tau < 1/a
};

inline constexpr std::array<IntegralBound, 5> kAllIntegralBounds{
    IntegralBound::lower_three_halves, IntegralBound::lower_half, IntegralBound::upper_half,
    IntegralBound::lower_minus_half, IntegralBound::upper_minus_half};

constexpr HalfOrder order_of(IntegralBound b) noexcept {
    switch (b) {
        case IntegralBound::lower_three_halves: return HalfOrder::three_halves;
        case IntegralBound::lower_half:
        case IntegralBound::upper_half: return HalfOrder::half;
        case IntegralBound::lower_minus_half:
        case IntegralBound::upper_minus_half: return HalfOrder::minus_half;
    }
    return HalfOrder::half;
}

constexpr bool is_upper(IntegralBound b) noexcept {
    return b == IntegralBound::upper_half || b == IntegralBound::upper_minus_half;
}

inline const char* name_of(IntegralBound b) noexcept {
    switch (b) {
        case IntegralBound::lower_three_halves: return "I_3/2_lower";
        case IntegralBound::lower_half: return "I_1/2_lower";
        case IntegralBound::upper_half: return "I_1/2_upper";
        case IntegralBound::lower_minus_half: return "I_-1/2_lower";
        case IntegralBound::upper_minus_half: return "I_-1/2_upper";
    }
    return "?";
}

/// Whether (tau, a) lies in the validity range of a bound.
inline bool applicable(IntegralBound b, double tau, double a) noexcept {
    switch (b) {
        case IntegralBound::lower_three_halves:
        case IntegralBound::upper_half: return tau < 1.0 / std::sqrt(a);
        case IntegralBound::lower_half: return tau < 1.0;
        case IntegralBound::lower_minus_half:
        case IntegralBound::upper_minus_half: return tau < 1.0 / a;
    }
    return false;
}

/// Right-hand side of one bound on I_k(y), for y != 0 and a > 1.
inline double integral_bound(IntegralBound b, double y, double tau, double sigma, double a) {
    if (!(a > 1.0)) throw DomainError("integral_bound: requires a > 1");
    check_tau_sigma(tau, sigma);
    if (y == 0.0) throw DomainError("integral_bound: requires y != 0");
    if (!applicable(b, tau, a)) {
        switch (b) {
            case IntegralBound::lower_three_halves:
            case IntegralBound::upper_half:
                throw DomainError(std::string(name_of(b)) + ": requires tau < 1/sqrt(a)");
            case IntegralBound::lower_half:
                throw DomainError(std::string(name_of(b)) + ": requires tau < 1");
            default: throw DomainError(std::string(name_of(b)) + ": requires tau < 1/a");
        }
    }
    const double s2 = sigma * sigma;
    const double y2 = y * y;
    const double xi = y2 / (2.0 * s2);
    const double sa = std::sqrt(a);
    const double e_full = std::exp(xi);
    const double e_a = std::exp(xi / a);
    const double e_tau2 = std::exp(tau * tau * xi);
    const double e_tau = std::exp(tau * xi);

    switch (b) {
        case IntegralBound::lower_three_halves:
            return tau * tau * tau / 5.0 + s2 * tau / y2 * (e_a - e_tau2) +
                   s2 / (sa * y2) * (e_full - e_a);
        case IntegralBound::lower_half:
            return tau / 3.0 + s2 / y2 * (e_full - e_tau2);
        case IntegralBound::upper_half:
            return 2.0 / 3.0 * e_tau2 * tau + 2.0 * e_a * (1.0 / sa - tau) +
                   2.0 * sa * s2 / y2 * (e_full - e_a);
        case IntegralBound::lower_minus_half:
            return 1.0 / tau + e_tau2 * (1.0 / tau - 1.0 / std::sqrt(tau)) +
                   a * sa * s2 / y2 * (e_a - e_tau) + s2 / y2 * (e_full - e_a);
        case IntegralBound::upper_minus_half:
            return 2.0 * e_tau2 / tau + 2.0 * e_tau * (1.0 / tau - 1.0 / std::sqrt(tau)) +
                   2.0 * e_a * (1.0 / std::sqrt(tau) - sa) + 2.0 * a * sa * s2 / y2 * (e_full - e_a);
    }
    return 0.0;
}

struct IntegralBounds {
    std::optional<double> lower;
    std::optional<double> upper;
};

/// All displayed bounds on I_k(y) that apply at (tau, a). Throws when none
/// of the bounds for this k is valid, naming the violated condition.
inline IntegralBounds lemma_A1_bounds(HalfOrder k, double y, double tau, double sigma, double a) {
    IntegralBounds out;
    std::string violated;
    for (IntegralBound b : kAllIntegralBounds) {
        if (order_of(b) != k) continue;
        try {
            const double v = integral_bound(b, y, tau, sigma, a);
            (is_upper(b) ? out.upper : out.lower) = v;
        } catch (const DomainError& e) {
            violated = e.what();
        }
    }
    if (!out.lower && !out.upper) throw DomainError(violated);
    return out;
}

// ---------------------------------------------------------------------------
// Posterior-mean bounds

/// f(tau) = I_{1/2}(0) / I_{-1/2}(0) in closed form (tau < 1).
inline double mean_bound_f(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("mean_bound_f: requires tau in (0, 1)");
    const double r = std::sqrt(1.0 - tau * tau);
    return tau / (1.0 - tau * tau) * (r / std::atan(r / tau) - tau);
}

struct MeanBounds {
    double bound1;  // y exp(xi) f(tau)
    double bound2;  // y * (upper on I_{1/2}) / (lower on I_{-1/2})
};

/// Two upper bounds on T_tau(y) for y > 0: bound1 needs tau < 1, bound2 tau < 1/a.
inline MeanBounds lemma_A2_mean_bounds(double y, double tau, double sigma, double a) {
    check_tau_sigma(tau, sigma);
    if (!(tau < 1.0)) throw DomainError("lemma_A2_mean_bounds: requires tau^2 < 1");
    if (!(tau < 1.0 / a)) throw DomainError("lemma_A2_mean_bounds: requires tau < 1/a");
    const double xi = y * y / (2.0 * sigma * sigma);
    MeanBounds out;
    out.bound1 = y * std::exp(xi) * mean_bound_f(tau);
    out.bound2 = y * integral_bound(IntegralBound::upper_half, y, tau, sigma, a) /
                 integral_bound(IntegralBound::lower_minus_half, y, tau, sigma, a);
    return out;
}

// ---------------------------------------------------------------------------
// Rates

/// p log(1/tau) + (n - p) tau sqrt(log(1/tau)).
inline double mse_upper_rate(const RateInputs& in) {
    in.validate();
    const double l = std::log(1.0 / in.tau);
    return static_cast<double>(in.p) * l + static_cast<double>(in.n - in.p) * in.tau * std::sqrt(l);
}

/// 2 sigma^2 p log(n/p).
inline double minimax_rate(std::size_t n, std::size_t p, double sigma) {
    if (p < 1 || p >= n) throw DomainError("minimax_rate: requires 1 <= p < n");
    if (!(sigma > 0.0)) throw DomainError("minimax_rate: sigma must be positive");
    return 2.0 * sigma * sigma * static_cast<double>(p) *
           std::log(static_cast<double>(n) / static_cast<double>(p));
}

struct VarianceRates {
    double upper;  // p log(1/tau) + (n - p) tau sqrt(log(1/tau))
    double lower;  // (n - p) tau sqrt(log(1/tau))
};

inline VarianceRates variance_rate_bounds(const RateInputs& in) {
    in.validate();
    const double l = std::log(1.0 / in.tau);
    const double zero_part = static_cast<double>(in.n - in.p) * in.tau * std::sqrt(l);
    return {static_cast<double>(in.p) * l + zero_part, zero_part};
}

struct MismatchRates {
    double bias_rate;
    double var_rate;
};

/// Orders of the squared bias and total posterior variance when the p
/// nonzero means equal gamma * sqrt(2 sigma^2 log(1/tau)).
inline MismatchRates mismatch_rates(const RateInputs& in, double gamma) {
    in.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("mismatch_rates: requires gamma in (0, 1)");
    const double l = std::log(1.0 / in.tau);
    const double p = static_cast<double>(in.p);
    const double zero_part = static_cast<double>(in.n - in.p) * in.tau * std::sqrt(l);
    return {p * l + zero_part,
            p * std::pow(in.tau, (1.0 - gamma) * (1.0 - gamma)) * std::pow(l, gamma - 0.5) + zero_part};
}

// ---------------------------------------------------------------------------
// Asymptotics of I_k

namespace detail {

inline QuadratureSettings tight_settings() {
    QuadratureSettings s;
    s.rel_tol = 1e-13;
    s.max_subdivisions = 200;
    return s;
}

}  // namespace detail

/// int_0^1 z^k / (1 + z) dz for k in {1/2, 3/2}, by quadrature in t = sqrt(z).
inline double asymptotic_constant(HalfOrder k) {
    if (k == HalfOrder::minus_half)
        throw DomainError("asymptotic_constant: use improper_constant() for k = -1/2");
    const int power = k == HalfOrder::half ? 2 : 4;  // z^k dz = 2 t^{2k+1} dt
    return integrate([&](double t) { return 2.0 * std::pow(t, power) / (1.0 + t * t); }, 0.0, 1.0,
                     detail::tight_settings());
}

/// int_0^inf z^{-1/2} / (1 + z) dz (= pi). Split at z = 1; the tail maps onto
/// [0, 1] through z -> 1/z, and z = t^2 removes the endpoint singularity.
inline double improper_constant() {
    auto piece = [](double t) { return 2.0 / (1.0 + t * t); };
    const auto s = detail::tight_settings();
    return integrate(piece, 0.0, 1.0, s) + integrate(piece, 0.0, 1.0, s);
}

/// Leading-order form of I_k(y) for small y * tau:
///   tau^{2k} c_k + (2 sigma^2 / y^2) exp(xi)            for k > 0,
///   tau^{-1} int_0^inf dz / (sqrt(z)(1 + z)) + (2 sigma^2 / y^2) exp(xi)  for k = -1/2.
inline double asymptotic_I(HalfOrder k, double y, double tau, double sigma) {
    check_tau_sigma(tau, sigma);
    if (y == 0.0) throw DomainError("asymptotic_I: requires y != 0");
    const double xi = y * y / (2.0 * sigma * sigma);
    const double tail = 2.0 * sigma * sigma / (y * y) * std::exp(xi);
    if (k == HalfOrder::minus_half) return improper_constant() / tau + tail;
    return std::pow(tau, 2.0 * to_double(k)) * asymptotic_constant(k) + tail;
}

/// int_1^y u^k exp(u) du / (y^k exp(y)), evaluated with exp(y) factored out.
inline double incomplete_exp_ratio(double k, double y) {
    if (!(y > 1.0)) throw DomainError("incomplete_exp_ratio: requires y > 1");
    auto f = [&](double u) { return std::pow(u / y, k) * std::exp(u - y); };
    // Breakpoints every unit near the top end where the mass sits.
    std::vector<double> bp{1.0};
    for (double b = y - 64.0; b < y; b += (y - b) > 8.0 ? 8.0 : 1.0)
        if (b > bp.back()) bp.push_back(b);
    bp.push_back(y);
    auto r = integrate_adaptive<1>([&](double u) { return std::array<double, 1>{f(u)}; },
                                   std::span<const double>(bp), detail::tight_settings());
    return r.value[0];
}

// ---------------------------------------------------------------------------
// Mismatch constants

struct MismatchConstants {
    double c1_gamma;
    double c2_gamma;
};

/// The two improper-integral constants in the mismatch asymptotics,
///   c1(gamma) = (2 sigma / sqrt(2 pi)) int e^{gamma u / sigma^2} / (pi + 2 sigma^2 e^{u / sigma^2}) du,
///   c2(gamma) = (2 sigma pi / sqrt(2 pi)) int e^{gamma u / sigma^2} / (pi + 2 sigma^2 e^{u / sigma^2})^2 du,
/// with the integration window doubled until the value moves by < 1e-10.
inline MismatchConstants mismatch_constants(double gamma, double sigma,
                                            double initial_half_width = 8.0) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("mismatch_constants: requires gamma in (0, 1)");
    if (!(sigma > 0.0)) throw DomainError("mismatch_constants: sigma must be positive");
    const double s2 = sigma * sigma;
    const double pi = improper_constant();
    auto integrand = [&](double u) {
        const double den = pi + 2.0 * s2 * std::exp(u / s2);
        const double num = std::exp(gamma * u / s2);
        return std::array<double, 2>{num / den, num / (den * den)};
    };
    auto window = [&](double half) {
        std::vector<double> bp;
        const int pieces = static_cast<int>(std::ceil(2.0 * half / (2.0 * s2)));
        for (int i = 0; i <= pieces; ++i) bp.push_back(-half + 2.0 * half * i / pieces);
        auto s = detail::tight_settings();
        s.abs_tol = 1e-300;
        s.max_subdivisions = 2000;
        return integrate_adaptive<2>(integrand, std::span<const double>(bp), s).value;
    };
    double half = initial_half_width * s2;
    auto prev = window(half);
    for (int round = 0; round < 40; ++round) {
        half *= 2.0;
        auto next = window(half);
        const bool settled = std::abs(next[0] - prev[0]) < 1e-10 && std::abs(next[1] - prev[1]) < 1e-10;
        prev = next;
        if (settled) break;
    }
    const double lead = 2.0 * sigma / std::sqrt(2.0 * std::numbers::pi);
    return {lead * prev[0], lead * pi * prev[1]};
}

// ---------------------------------------------------------------------------
// Empirical Bayes estimator

/// q_n = 2 (1 - Phi(sqrt(c1 log n))), the per-coordinate exceedance
/// probability of a zero mean at unit variance.
inline double exceedance_probability(std::size_t n, double c1) {
    return std::erfc(std::sqrt(c1 * std::log(static_cast<double>(n))) / std::numbers::sqrt2);
}

/// Mills-ratio upper bound sqrt(2/(c1 pi)) (log n)^{-1/2} n^{-c1/2} on q_n.
inline double exceedance_mills_bound(std::size_t n, double c1) {
    const double nd = static_cast<double>(n);
    return std::sqrt(2.0 / (c1 * std::numbers::pi)) / std::sqrt(std::log(nd)) * std::pow(nd, -c1 / 2.0);
}

/// Chernoff bound on P(tau_hat > p/n) for the counting estimator,
///   (e (n - p) q_n / ((c2 - 1) p + 1))^{(c2 - 1) p + 1}, capped at 1.
inline double chernoff_tau_bound(std::size_t n, std::size_t p, double c1, double c2) {
    if (!(c2 > 1.0)) throw DomainError("chernoff_tau_bound: requires c2 > 1");
    if (p >= n) throw DomainError("chernoff_tau_bound: requires p < n");
    if (!(c1 > 0.0)) throw DomainError("chernoff_tau_bound: requires c1 > 0");
    const double k = (c2 - 1.0) * static_cast<double>(p) + 1.0;
    const double base = std::numbers::e * static_cast<double>(n - p) * exceedance_probability(n, c1) / k;
    return std::min(1.0, std::exp(k * std::log(base)));
}

struct ConditionReport {
    bool condition1_holds;
    bool condition2_holds;
    /// prob_over / (p/n); condition 1 holds when this is <= constant.
    double condition1_ratio;
    /// -log(g) prob_under / log(n/p); condition 2 holds when this is <= constant.
    double condition2_ratio;
};

/// Arithmetic check of the two conditions on a tau estimator, with a
/// user-chosen constant standing in for the order relation.
inline ConditionReport thm41_condition_check(double prob_over, double prob_under, double g_value,
                                             std::size_t n, std::size_t p, double constant = 1.0) {
    if (!(prob_over >= 0.0 && prob_over <= 1.0) || !(prob_under >= 0.0 && prob_under <= 1.0))
        throw DomainError("thm41_condition_check: probabilities must lie in [0, 1]");
    if (!(g_value > 0.0 && g_value < 1.0)) throw DomainError("thm41_condition_check: g must lie in (0, 1)");
    if (p < 1 || p >= n) throw DomainError("thm41_condition_check: requires 1 <= p < n");
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(p);
    ConditionReport r;
    r.condition1_ratio = prob_over / (pd / nd);
    r.condition2_ratio = -std::log(g_value) * prob_under / std::log(nd / pd);
    r.condition1_holds = r.condition1_ratio <= constant;
    r.condition2_holds = r.condition2_ratio <= constant;
    return r;
}

}  // namespace horseshoe::bounds
