#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/exponent_scaled.hpp"
#include "horseshoe/quadrature.hpp"

namespace horseshoe {

/// Exponent k of the integrals
///   I_k(y) = int_0^1 z^k exp(xi z) / (tau^2 + (1 - tau^2) z) dz,  xi = y^2 / (2 sigma^2).
/// Only the three orders that appear in posterior functionals are supported.
enum class HalfOrder { minus_half, half, three_halves };

constexpr double to_double(HalfOrder k) noexcept {
    switch (k) {
        case HalfOrder::minus_half: return -0.5;
        case HalfOrder::half: return 0.5;
        case HalfOrder::three_halves: return 1.5;
    }
    return 0.0;
}

inline void check_tau_sigma(double tau, double sigma) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw DomainError("tau must lie in (0, 1], got " + std::to_string(tau));
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("sigma must be positive and finite, got " + std::to_string(sigma));
}

/// Integrand components that can be evaluated in one quadrature pass. Each is
/// a polynomial in (z, 1 - z) times the common weight z^{-1/2} w(z), so the
/// expensive exp(xi z) factor is computed once per node for all of them.
enum class Component {
    i_minus_half,    // z^{-1/2} w
    i_half,          // z^{1/2} w
    i_three_halves,  // z^{3/2} w
    gap,             // (1 - z) z^{-1/2} w
    gap_squared,     // (1 - z)^2 z^{-1/2} w
};

constexpr Component component_of(HalfOrder k) noexcept {
    switch (k) {
        case HalfOrder::minus_half: return Component::i_minus_half;
        case HalfOrder::half: return Component::i_half;
        case HalfOrder::three_halves: return Component::i_three_halves;
    }
    return Component::i_minus_half;
}

/// Raw quadrature output: component c equals scaled[c] * exp(log_scale).
template <std::size_t N>
struct ScaledIntegrals {
    std::array<double, N> scaled{};
    double log_scale = 0.0;
    int subdivisions = 0;
};

namespace detail {

inline double component_factor(Component c, double z, double one_minus_z) noexcept {
    switch (c) {
        case Component::i_minus_half: return 1.0;
        case Component::i_half: return z;
        case Component::i_three_halves: return z * z;
        case Component::gap: return one_minus_z;
        case Component::gap_squared: return one_minus_z * one_minus_z;
    }
    return 0.0;
}

// Geometric breakpoints first, first * ratio, ... strictly inside (lo, hi).
inline std::vector<double> geometric_breaks(double lo, double hi, double first, double ratio) {
    std::vector<double> out{lo};
    for (double b = first; b < hi; b *= ratio)
        if (b > lo * 1.0000001 + 1e-300) out.push_back(b);
    out.push_back(hi);
    return out;
}

// Integrates 2 * factor(t^2, 1 - t^2) * exp(xi t^2 + shift) / (tau^2 + (1 - tau^2) t^2)
// over t in [0, t_max]. The substitution z = t^2 turns z^{-1/2} dz into 2 dt.
template <std::size_t N>
QuadratureResult<N> integrate_t_form(const std::array<Component, N>& comps, double xi, double shift,
                                     double tau, double t_max, const QuadratureSettings& s) {
    const double tau2 = tau * tau;
    const double one_minus_tau2 = 1.0 - tau2;
    auto f = [&](double t) {
        const double z = t * t;
        const double omz = 1.0 - z;
        const double w = 2.0 * std::exp(xi * z + shift) / (tau2 + one_minus_tau2 * z);
        std::array<double, N> v;
        for (std::size_t c = 0; c < N; ++c) v[c] = component_factor(comps[c], z, omz) * w;
        return v;
    };
    std::vector<double> bp = (tau < 0.5 * t_max) ? geometric_breaks(0.0, t_max, tau, 2.0)
                                                 : std::vector<double>{0.0, t_max};
    return integrate_adaptive<N>(f, std::span<const double>(bp), s);
}

// Integrates factor(1 - x, x) (1 - x)^{-1/2} exp(-xi x) / (1 - (1 - tau^2) x)
// over x in [0, x_max], x_max < 1; the (1 - z) factors are exactly x here.
template <std::size_t N>
QuadratureResult<N> integrate_x_form(const std::array<Component, N>& comps, double xi, double tau,
                                     double x_max, const QuadratureSettings& s) {
    const double one_minus_tau2 = 1.0 - tau * tau;
    auto f = [&](double x) {
        const double z = 1.0 - x;
        const double w = std::exp(-xi * x) / (std::sqrt(z) * (1.0 - one_minus_tau2 * x));
        std::array<double, N> v;
        for (std::size_t c = 0; c < N; ++c) v[c] = component_factor(comps[c], z, x) * w;
        return v;
    };
    std::vector<double> bp = geometric_breaks(0.0, x_max, 1.0 / xi, 2.0);
    return integrate_adaptive<N>(f, std::span<const double>(bp), s);
}

}  // namespace detail

/// Evaluates the requested components for one (y, tau, sigma).
///
/// For xi <= large_xi_threshold the integral runs over z directly (via
/// z = t^2). Above the threshold it switches to x = 1 - z with exp(xi)
/// carried in log_scale: x in [0, 1/2] is integrated in x, and the remaining
/// z in [0, 1/2] (where the tau^2 spike and the z^{-1/2} endpoint live) in t
/// with the same exp(-xi) scaling.
template <std::size_t N>
ScaledIntegrals<N> horseshoe_integrals(const std::array<Component, N>& comps, double y, double tau,
                                       double sigma, const QuadratureSettings& settings = {}) {
    check_tau_sigma(tau, sigma);
    if (!std::isfinite(y)) throw DomainError("y must be finite");
    settings.validate();

    const double xi = y * y / (2.0 * sigma * sigma);
    if (!std::isfinite(xi)) throw DomainError("y^2 / (2 sigma^2) overflows a double");
    ScaledIntegrals<N> out;
    if (xi <= settings.large_xi_threshold) {
        auto r = detail::integrate_t_form<N>(comps, xi, 0.0, tau, 1.0, settings);
        out.scaled = r.value;
        out.subdivisions = r.subdivisions;
        return out;
    }
    // The two pieces share one relative tolerance budget through their sum;
    // each is solved to rel_tol of its own size, which is at least as strict.
    auto near_one = detail::integrate_x_form<N>(comps, xi, tau, 0.5, settings);
    auto near_zero = detail::integrate_t_form<N>(comps, xi, -xi, tau, std::sqrt(0.5), settings);
    for (std::size_t c = 0; c < N; ++c) out.scaled[c] = near_one.value[c] + near_zero.value[c];
    out.log_scale = xi;
    out.subdivisions = near_one.subdivisions + near_zero.subdivisions;
    return out;
}

/// I_k(y) in overflow-safe form.
inline ExponentScaledValue integral_I(HalfOrder k, double y, double tau, double sigma,
                                      const QuadratureSettings& settings = {}) {
    auto r = horseshoe_integrals<1>({component_of(k)}, y, tau, sigma, settings);
    return {r.scaled[0], r.log_scale};
}

/// I_{k_num}(y) / I_{k_den}(y). Both integrals share nodes and scale, so
/// exp(xi) cancels without ever being formed.
inline double integral_ratio(HalfOrder k_num, HalfOrder k_den, double y, double tau, double sigma,
                             const QuadratureSettings& settings = {}) {
    auto r = horseshoe_integrals<2>({component_of(k_num), component_of(k_den)}, y, tau, sigma,
                                    settings);
    return r.scaled[0] / r.scaled[1];
}

namespace detail {

// 1F1(a; b; x) by its power series; x < 0 goes through Kummer's transform so
// the summed terms never alternate.
inline double hyp1f1_series(double a, double b, double x, double rel_tol, long max_terms) {
    if (x < 0.0) return std::exp(x) * hyp1f1_series(b - a, b, -x, rel_tol, max_terms);
    double term = 1.0;
    double sum = 1.0;
    for (long m = 0; m < max_terms; ++m) {
        term *= (a + m) / (b + m) * x / (m + 1);
        sum += term;
        // Terms decrease geometrically once m exceeds x.
        if (m + 1 > x && std::abs(term) <= rel_tol * std::abs(sum) * 1e-2) return sum;
    }
    throw SeriesFailure("1F1 series did not converge within the iteration cap");
}

}  // namespace detail

/// Humbert's Phi_1(alpha, beta, gamma; x, w)
///   = sum_{m,n} (alpha)_{m+n} (beta)_n / ((gamma)_{m+n} m! n!) x^m w^n,
/// with x the exponential argument and w the argument of (1 - w t)^{-beta}
/// in its integral representation. Summed as
///   sum_n (alpha)_n (beta)_n / ((gamma)_n n!) w^n 1F1(alpha + n; gamma + n; x).
/// Requires |w| < 1. Intended as an independent check, not a production path.
inline double phi1_series(double alpha, double beta, double gamma, double x, double w,
                          double rel_tol = 1e-14) {
    constexpr long kMaxTerms = 100000;
    if (!(std::abs(w) < 1.0)) throw DomainError("phi1_series: requires |w| < 1");
    if (!std::isfinite(x)) throw DomainError("phi1_series: x must be finite");
    if (!(rel_tol > 0.0)) throw DomainError("phi1_series: rel_tol must be positive");

    double coeff = 1.0;  // (alpha)_n (beta)_n / ((gamma)_n n!) w^n
    double sum = 0.0;
    int small_in_a_row = 0;
    for (long n = 0; n < kMaxTerms; ++n) {
        const double inner = detail::hyp1f1_series(alpha + n, gamma + n, x, rel_tol, kMaxTerms);
        const double term = coeff * inner;
        sum += term;
        // Outer coefficients eventually shrink like |w|^n; bound the rest by a
        // geometric tail and ask for a few consecutive confirmations.
        const double tail = std::abs(term) * std::abs(w) / (1.0 - std::abs(w));
        if (n > 2 && tail <= rel_tol * std::abs(sum)) {
            if (++small_in_a_row >= 3) return sum;
        } else {
            small_in_a_row = 0;
        }
        if (coeff == 0.0) return sum;
        coeff *= (alpha + n) * (beta + n) / ((gamma + n) * (n + 1)) * w;
    }
    throw SeriesFailure("phi1_series: double series did not converge within the iteration cap");
}

/// Shrinkage weight I_{1/2}/I_{-1/2} through the hypergeometric form,
///   1 - 2 Phi_1(1/2, 1, 5/2; xi, 1 - 1/tau^2) / (3 Phi_1(1/2, 1, 3/2; xi, 1 - 1/tau^2)).
/// Only valid for tau > 1/sqrt(2).
inline double series_shrinkage_weight(double y, double tau, double sigma, double rel_tol = 1e-14) {
    check_tau_sigma(tau, sigma);
    const double xi = y * y / (2.0 * sigma * sigma);
    const double w = 1.0 - 1.0 / (tau * tau);
    const double num = phi1_series(0.5, 1.0, 2.5, xi, w, rel_tol);
    const double den = phi1_series(0.5, 1.0, 1.5, xi, w, rel_tol);
    return 1.0 - 2.0 * num / (3.0 * den);
}

}  // namespace horseshoe
