#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/quadrature.hpp"
#include "horseshoe/special_functions.hpp"

namespace horseshoe {

/// Global shrinkage tau and noise scale sigma of the model Y ~ N(theta, sigma^2).
struct ShrinkageConfig {
    double tau = 1.0;
    double sigma = 1.0;

    void validate() const { check_tau_sigma(tau, sigma); }
};

/// Per-observation posterior summary. mean == shrinkage_weight * y.
struct PosteriorSummary {
    double mean = 0.0;
    double variance = 0.0;
    /// E[1 - kappa | y, tau] in [0, 1].
    double shrinkage_weight = 0.0;
};

namespace detail {

inline constexpr std::array<Component, 5> kSummaryComponents{
    Component::i_minus_half, Component::i_half, Component::i_three_halves, Component::gap,
    Component::gap_squared};

// Var = (sigma^2 / y) T - (T - y)^2 + y^2 E[(1 - z)^2], with (sigma^2 / y) T
// written as sigma^2 * weight so y = 0 needs no special case, and T - y taken
// from the (1 - z) moment directly rather than by subtraction.
inline PosteriorSummary summarize_from(const ScaledIntegrals<5>& r, double y, double sigma,
                                       double rel_tol) {
    const double i_minus = r.scaled[0];
    const double weight = r.scaled[1] / i_minus;
    const double gap = r.scaled[3] / i_minus;         // E[kappa | y]
    const double gap_sq = r.scaled[4] / i_minus;      // E[kappa^2 | y]
    const double mean = y * weight;
    const double shrink = y * gap;                    // y - T
    double var = sigma * sigma * weight - shrink * shrink + y * y * gap_sq;
    if (var < 0.0) {
        if (var < -10.0 * rel_tol * sigma * sigma)
            throw InconsistencyError("posterior variance evaluated to " + std::to_string(var) +
                                     " at y = " + std::to_string(y));
        var = 0.0;
    }
    return {mean, var, weight};
}

}  // namespace detail

/// Mean, variance and weight from one shared quadrature pass over
/// I_{-1/2}, I_{1/2}, I_{3/2} and the two (1 - z) moments. posterior_mean,
/// posterior_variance and shrinkage_weight all go through here, so their
/// results agree bit for bit with the fields of the summary.
inline PosteriorSummary summarize(double y, const ShrinkageConfig& cfg,
                                  const QuadratureSettings& settings = {}) {
    cfg.validate();
    auto r = horseshoe_integrals<5>(detail::kSummaryComponents, y, cfg.tau, cfg.sigma, settings);
    return detail::summarize_from(r, y, cfg.sigma, settings.rel_tol);
}

/// E[1 - kappa | y, tau] = I_{1/2}(y) / I_{-1/2}(y); at y = 0 this is the
/// xi = 0 ratio.
inline double shrinkage_weight(double y, const ShrinkageConfig& cfg,
                               const QuadratureSettings& settings = {}) {
    return summarize(y, cfg, settings).shrinkage_weight;
}

/// Horseshoe estimator T_tau(y) = y I_{1/2}(y) / I_{-1/2}(y); odd in y.
inline double posterior_mean(double y, const ShrinkageConfig& cfg,
                             const QuadratureSettings& settings = {}) {
    return summarize(y, cfg, settings).mean;
}

inline std::vector<PosteriorSummary> summarize(std::span<const double> ys, const ShrinkageConfig& cfg,
                                               const QuadratureSettings& settings = {}) {
    std::vector<PosteriorSummary> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back(summarize(y, cfg, settings));
    return out;
}

/// Posterior variance Var(theta | y).
inline double posterior_variance(double y, const ShrinkageConfig& cfg,
                                 const QuadratureSettings& settings = {}) {
    return summarize(y, cfg, settings).variance;
}

/// Marginal density m(y) = tau exp(-xi) I_{-1/2}(y) / (sqrt(2 pi^3) sigma).
inline double marginal_density(double y, const ShrinkageConfig& cfg,
                               const QuadratureSettings& settings = {}) {
    cfg.validate();
    const double xi = y * y / (2.0 * cfg.sigma * cfg.sigma);
    const ExponentScaledValue i = integral_I(HalfOrder::minus_half, y, cfg.tau, cfg.sigma, settings);
    const double norm = std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
    return cfg.tau * i.scaled_value(-xi) / (norm * cfg.sigma);
}

/// Prior density of kappa = 1 / (1 + tau^2 lambda^2) under lambda ~ C+(0, 1).
inline double kappa_prior_density(double kappa, double tau) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("kappa must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
    return tau / std::numbers::pi / (1.0 - (1.0 - tau * tau) * kappa) /
           std::sqrt((1.0 - kappa) * kappa);
}

/// zeta_tau = sqrt(2 sigma^2 log(1/tau)), the bounded-shrinkage envelope.
inline double shrinkage_gap_bound(const ShrinkageConfig& cfg) {
    cfg.validate();
    if (cfg.tau == 1.0) return 0.0;
    return std::sqrt(2.0 * cfg.sigma * cfg.sigma * std::log(1.0 / cfg.tau));
}

}  // namespace horseshoe
