#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "horseshoe/errors.hpp"

namespace horseshoe {

struct QuadratureSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-30;
    /// Number of bisections allowed on top of the initial partition.
    int max_subdivisions = 60;
    /// Above this xi = y^2 / (2 sigma^2) the integrals are evaluated with
    /// the exp(xi) factor pulled out (x = 1 - z parameterization).
    double large_xi_threshold = 30.0;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw DomainError("QuadratureSettings: tolerances must be positive");
        if (max_subdivisions < 8)
            throw DomainError("QuadratureSettings: max_subdivisions must be >= 8");
        if (!(large_xi_threshold > 0.0))
            throw DomainError("QuadratureSettings: large_xi_threshold must be positive");
    }
};

template <std::size_t N>
struct QuadratureResult {
    std::array<double, N> value{};
    std::array<double, N> error{};
    int subdivisions = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule. Node tables come
// from Boost; the adaptive driver below is ours.
struct Gk21 {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    static std::span<const double> kronrod_nodes() {
        const auto& a = Kronrod::abscissa();
        return {a.data(), a.size()};
    }
    static std::span<const double> kronrod_weights() {
        const auto& w = Kronrod::weights();
        return {w.data(), w.size()};
    }
    static std::span<const double> gauss_weights() {
        const auto& w = Gauss::weights();
        return {w.data(), w.size()};
    }
};

template <std::size_t N>
struct Panel {
    double a, b;
    std::array<double, N> value;
    std::array<double, N> error;
};

// Kronrod abscissae are stored for x >= 0 with x = 0 first; odd-indexed
// nodes are shared with the Gauss rule (Gauss has no centre node for n = 10).
template <std::size_t N, class F>
Panel<N> gk21_panel(const F& f, double a, double b) {
    const auto xk = Gk21::kronrod_nodes();
    const auto wk = Gk21::kronrod_weights();
    const auto wg = Gk21::gauss_weights();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, N> kron{};
    std::array<double, N> gauss{};
    const std::array<double, N> f0 = f(centre);
    for (std::size_t c = 0; c < N; ++c) kron[c] = wk[0] * f0[c];

    for (std::size_t j = 1; j < xk.size(); ++j) {
        const double dx = half * xk[j];
        const std::array<double, N> lo = f(centre - dx);
        const std::array<double, N> hi = f(centre + dx);
        for (std::size_t c = 0; c < N; ++c) {
            const double pair = lo[c] + hi[c];
            kron[c] += wk[j] * pair;
            if (j % 2 == 1) gauss[c] += wg[j / 2] * pair;
        }
    }
    Panel<N> p{a, b, {}, {}};
    for (std::size_t c = 0; c < N; ++c) {
        p.value[c] = kron[c] * half;
        p.error[c] = std::abs((kron[c] - gauss[c]) * half);
    }
    return p;
}

}  // namespace detail

/// Globally adaptive bisection with a GK21 panel rule on a vector-valued
/// integrand. Every component shares the same nodes; the panel with the
/// worst tolerance-normalized error is split until all components meet
/// max(abs_tol, rel_tol * |I_c|).
///
/// `breakpoints` must be increasing and span the whole interval.
template <std::size_t N, class F>
QuadratureResult<N> integrate_adaptive(const F& f, std::span<const double> breakpoints,
                                       const QuadratureSettings& settings) {
    if (breakpoints.size() < 2)
        throw DomainError("integrate_adaptive: need at least two breakpoints");

    std::vector<detail::Panel<N>> panels;
    panels.reserve(breakpoints.size() + static_cast<std::size_t>(settings.max_subdivisions));
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        panels.push_back(detail::gk21_panel<N>(f, breakpoints[i], breakpoints[i + 1]));

    QuadratureResult<N> out;
    for (;;) {
        // Re-sum from scratch in panel order so results do not depend on the
        // history of splits.
        std::array<double, N> total{};
        std::array<double, N> err{};
        for (const auto& p : panels)
            for (std::size_t c = 0; c < N; ++c) {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
        std::array<double, N> tol{};
        bool done = true;
        for (std::size_t c = 0; c < N; ++c) {
            tol[c] = std::max(settings.abs_tol, settings.rel_tol * std::abs(total[c]));
            if (!(err[c] <= tol[c])) done = false;
        }
        out.value = total;
        out.error = err;
        if (done) return out;

        if (out.subdivisions >= settings.max_subdivisions) {
            std::size_t worst = 0;
            for (std::size_t c = 1; c < N; ++c)
                if (err[c] / tol[c] > err[worst] / tol[worst]) worst = c;
            throw QuadratureFailure("adaptive quadrature did not converge within " +
                                        std::to_string(settings.max_subdivisions) +
                                        " subdivisions",
                                    total[worst], err[worst]);
        }

        auto score = [&](const detail::Panel<N>& p) {
            double s = 0.0;
            for (std::size_t c = 0; c < N; ++c) s = std::max(s, p.error[c] / tol[c]);
            return s;
        };
        auto it = std::max_element(panels.begin(), panels.end(),
                                   [&](const auto& l, const auto& r) { return score(l) < score(r); });
        const double a = it->a;
        const double b = it->b;
        const double mid = 0.5 * (a + b);
        *it = detail::gk21_panel<N>(f, a, mid);
        panels.insert(it + 1, detail::gk21_panel<N>(f, mid, b));
        ++out.subdivisions;
    }
}

/// Scalar convenience wrapper over integrate_adaptive on [a, b].
template <class F>
double integrate(const F& f, double a, double b, const QuadratureSettings& settings = {}) {
    const std::array<double, 2> bp{a, b};
    auto r = integrate_adaptive<1>([&](double x) { return std::array<double, 1>{f(x)}; },
                                   std::span<const double>(bp), settings);
    return r.value[0];
}

}  // namespace horseshoe
