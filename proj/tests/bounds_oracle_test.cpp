#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "horseshoe/bounds_oracle.hpp"
#include "horseshoe/posterior.hpp"
#include "horseshoe/verification.hpp"
#include "oracles.hpp"

using namespace horseshoe;
using namespace horseshoe::bounds;

TEST(IntegralBounds, LowerHalfTranscription) {
    // xi = 5, tau = 0.01, sigma = 1.
    const double y = std::sqrt(10.0), tau = 0.01;
    const double expect = tau / 3.0 + (std::exp(5.0) - std::exp(tau * tau * 5.0)) / 10.0;
    EXPECT_NEAR(integral_bound(IntegralBound::lower_half, y, tau, 1.0, 2.0), expect, 1e-13 * expect);
}

TEST(IntegralBounds, SandwichHalfOrder) {
    const double y = std::sqrt(20.0), tau = 1e-3;
    const auto b = lemma_A1_bounds(HalfOrder::half, y, tau, 1.0, 2.0);
    ASSERT_TRUE(b.lower && b.upper);
    const double i = integral_I(HalfOrder::half, y, tau, 1.0).value();
    EXPECT_LE(*b.lower, i);
    EXPECT_LE(i, *b.upper);
}

TEST(IntegralBounds, DomainErrorNamesCondition) {
    try {
        integral_bound(IntegralBound::lower_minus_half, 1.0, 0.9, 1.0, 2.0);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("tau < 1/a"), std::string::npos);
    }
    EXPECT_THROW(lemma_A1_bounds(HalfOrder::minus_half, 1.0, 0.9, 1.0, 2.0), DomainError);
    EXPECT_THROW(integral_bound(IntegralBound::upper_half, 1.0, 0.8, 1.0, 2.0), DomainError);
    EXPECT_THROW(integral_bound(IntegralBound::lower_half, 1.0, 0.5, 1.0, 1.0), DomainError);
    // Only the lower bound on I_{1/2} applies between 1/sqrt(a) and 1.
    const auto b = lemma_A1_bounds(HalfOrder::half, 1.0, 0.9, 1.0, 2.0);
    EXPECT_TRUE(b.lower.has_value());
    EXPECT_FALSE(b.upper.has_value());
}

TEST(IntegralBounds, CertifiedOnGrid) {
    for (const auto& row : verify::lemma_A1()) {
        EXPECT_TRUE(row.pass()) << row.check << " slack " << row.worst_slack << " at " << row.worst_point;
        EXPECT_GT(row.points, 0u);
    }
}

TEST(IntegralBounds, HoldAgainstFiftyDigitIntegrals) {
    for (double tau : {0.3, 0.05})
        for (double xi : {2.0, 12.0}) {
            const double y = std::sqrt(2.0 * xi);
            for (auto b : kAllIntegralBounds) {
                if (!applicable(b, tau, 2.0)) continue;
                const double exact = static_cast<double>(oracle::integral_I_mp(to_double(order_of(b)), y, tau, 1.0));
                const double bound = integral_bound(b, y, tau, 1.0, 2.0);
                if (is_upper(b)) EXPECT_LE(exact, bound) << name_of(b);
                else EXPECT_LE(bound, exact) << name_of(b);
            }
        }
}

TEST(MeanBounds, FEnvelopes) {
    EXPECT_LE(mean_bound_f(0.1) / 0.1, 2.0 / 3.0);
    EXPECT_LE(mean_bound_f(0.5) / 0.5, 2.0 / 3.0 / 1.5);
    // f is also the zero-y shrinkage weight.
    EXPECT_NEAR(mean_bound_f(0.5), shrinkage_weight(0.0, {0.5, 1.0}), 1e-12);
    EXPECT_THROW(mean_bound_f(1.0), DomainError);
}

TEST(MeanBounds, DominatePosteriorMean) {
    for (double tau : {0.05, 0.01})
        for (double y = 0.1; y <= 6.0; y += 0.1) {
            const double t = posterior_mean(y, {tau, 1.0});
            const auto b = lemma_A2_mean_bounds(y, tau, 1.0, 2.0);
            EXPECT_LE(t, b.bound1 * (1.0 + 1e-9));
            EXPECT_LE(t, b.bound2 * (1.0 + 1e-9));
        }
    EXPECT_THROW(lemma_A2_mean_bounds(1.0, 0.6, 1.0, 2.0), DomainError);
}

TEST(Rates, MseUpperRate) {
    const double l = std::log(20.0);
    EXPECT_NEAR(mse_upper_rate({400, 20, 0.05, 1.0}), 20.0 * l + 380.0 * 0.05 * std::sqrt(l), 1e-12);
    double prev = 0.0;
    for (std::size_t p = 1; p < 200; p += 7) {
        const double r = mse_upper_rate({400, p, 0.05, 1.0});
        EXPECT_GT(r, prev);
        prev = r;
    }
    EXPECT_THROW(mse_upper_rate({400, 400, 0.05, 1.0}), DomainError);
    EXPECT_THROW(mse_upper_rate({400, 20, 1.0, 1.0}), DomainError);
}

TEST(Rates, MinimaxRate) {
    EXPECT_NEAR(minimax_rate(400, 20, 1.0), 40.0 * std::log(20.0), 1e-12);
    EXPECT_NEAR(minimax_rate(400, 20, 1.0), 119.8, 0.05);
    EXPECT_NEAR(minimax_rate(1000, 500, 1.0), 1000.0 * std::log(2.0), 1e-10);
    EXPECT_NEAR(minimax_rate(400, 20, 2.0), 4.0 * minimax_rate(400, 20, 1.0), 1e-10);
}

TEST(Rates, VarianceRateBounds) {
    struct Case {
        std::size_t n, p;
        double tau;
    };
    for (auto c : {Case{400, 20, 0.05}, Case{400, 40, 0.1}, Case{1000, 10, 0.01}}) {
        const double l = std::log(1.0 / c.tau);
        const double zero = static_cast<double>(c.n - c.p) * c.tau * std::sqrt(l);
        const auto r = variance_rate_bounds({c.n, c.p, c.tau, 1.0});
        EXPECT_NEAR(r.lower, zero, 1e-12 * zero);
        EXPECT_NEAR(r.upper, static_cast<double>(c.p) * l + zero, 1e-12 * r.upper);
    }
}

TEST(Rates, MismatchRates) {
    // gamma -> 1: first variance term tends to p sqrt(log(1/tau)).
    const RateInputs in{400, 20, 0.05, 1.0};
    const double l = std::log(20.0);
    const auto near_one = mismatch_rates(in, 1.0 - 1e-9);
    const double zero = 380.0 * 0.05 * std::sqrt(l);
    EXPECT_NEAR(near_one.var_rate - zero, 20.0 * std::sqrt(l), 1e-6);

    // With tau = p / n the shared zero-coordinate term (n - p) tau sqrt(log(1/tau))
    // keeps the full ratio near 0.29 at n = 1e6; the gap opens in the signal part.
    const RateInputs big{1000000, 1000, 1e-3, 1.0};
    const auto m = mismatch_rates(big, 0.5);
    const double shared = 999000.0 * 1e-3 * std::sqrt(std::log(1e3));
    EXPECT_NEAR(m.var_rate / m.bias_rate, 0.294, 1e-3);
    const double signal_ratio = (m.var_rate - shared) / (m.bias_rate - shared);
    EXPECT_NEAR(signal_ratio, std::pow(1e-3, 0.25) / std::log(1e3), 1e-12);
    const auto huge = mismatch_rates({1000000000000ULL, 1000, 1e-9, 1.0}, 0.5);
    const double shared_huge = (1e12 - 1e3) * 1e-9 * std::sqrt(std::log(1e9));
    EXPECT_LT((huge.var_rate - shared_huge) / (huge.bias_rate - shared_huge), 1e-2);

    const double tau = oracle_tau(400, 20, OracleVariant::log_corrected);
    const auto g = mismatch_rates({400, 20, tau, 1.0}, 0.5);
    const double ref = 20.0 * std::log(20.0);
    EXPECT_LT(g.bias_rate / ref, 25.0);
    EXPECT_GT(g.bias_rate / ref, 1.0 / 25.0);
    EXPECT_LT(g.var_rate / ref, 25.0);
    EXPECT_GT(g.var_rate / ref, 1.0 / 25.0);
}

TEST(Asymptotics, ImproperConstantIsPi) {
    EXPECT_NEAR(improper_constant(), std::numbers::pi, 1e-10);
    EXPECT_NEAR(asymptotic_constant(HalfOrder::half), 2.0 - std::numbers::pi / 2.0, 1e-12);
    EXPECT_NEAR(asymptotic_constant(HalfOrder::three_halves), std::numbers::pi / 2.0 - 4.0 / 3.0, 1e-12);
}

TEST(Asymptotics, RelativeErrorSmallAndDecreasing) {
    const HalfOrder ks[] = {HalfOrder::minus_half, HalfOrder::half, HalfOrder::three_halves};
    for (HalfOrder k : ks) {
        double prev = 1e300;
        for (double tau : {1e-3, 1e-4, 1e-5, 1e-6}) {
            const double y = shrinkage_gap_bound({tau, 1.0});
            const double err = std::abs(asymptotic_I(k, y, tau, 1.0) / integral_I(k, y, tau, 1.0).value() - 1.0);
            EXPECT_LT(err, prev);
            prev = err;
        }
        EXPECT_LT(prev, 0.1);
    }
}

TEST(Asymptotics, EvenInY) {
    EXPECT_EQ(asymptotic_I(HalfOrder::half, 3.0, 1e-3, 1.0), asymptotic_I(HalfOrder::half, -3.0, 1e-3, 1.0));
}

TEST(Asymptotics, IncompleteExponentialRatio) {
    // y |ratio - 1| settles near |k| as y grows (ratio = 1 - k / y + O(1/y^2)).
    for (double k : {-0.5, 0.5, 1.5}) {
        const double c40 = 40.0 * std::abs(incomplete_exp_ratio(k, 40.0) - 1.0);
        const double c80 = 80.0 * std::abs(incomplete_exp_ratio(k, 80.0) - 1.0);
        EXPECT_NEAR(c80 / c40, 1.0, 0.1);
        EXPECT_NEAR(c80, std::abs(k), 0.1);
    }
}

TEST(MismatchConstants, PositiveAndStable) {
    for (double g : {0.1, 0.5, 0.9}) {
        const auto c = mismatch_constants(g, 1.0);
        EXPECT_GT(c.c1_gamma, 0.0);
        EXPECT_GT(c.c2_gamma, 0.0);
        // Starting from a window twice as wide lands on the same value.
        const auto wide = mismatch_constants(g, 1.0, 16.0);
        EXPECT_NEAR(wide.c1_gamma, c.c1_gamma, 1e-9);
        EXPECT_NEAR(wide.c2_gamma, c.c2_gamma, 1e-9);
    }
    // gamma = 1/2: v = e^u turns c1 into a Beta integral equal to 1 exactly.
    EXPECT_NEAR(mismatch_constants(0.5, 1.0).c1_gamma, 1.0, 1e-9);
}

TEST(MismatchConstants, SigmaScaling) {
    // With u = sigma^2 v the integral over u is sigma^2 times one in v with
    // 2 sigma^2 in place of 2; recompute that directly.
    for (double sigma : {0.5, 2.0}) {
        const double g = 0.3;
        const auto c = mismatch_constants(g, sigma);
        boost::math::quadrature::tanh_sinh<double> ts;
        const double s2 = sigma * sigma;
        auto f = [&](double v) { return std::exp(g * v) / (std::numbers::pi + 2.0 * s2 * std::exp(v)); };
        const double inner = ts.integrate(f, -200.0, 0.0) + ts.integrate(f, 0.0, 200.0);
        const double expect = 2.0 * sigma / std::sqrt(2.0 * std::numbers::pi) * s2 * inner;
        EXPECT_NEAR(c.c1_gamma / expect, 1.0, 1e-8);
    }
}

TEST(Chernoff, BoundProperties) {
    const double b = chernoff_tau_bound(400, 20, 2.0, 1.5);
    EXPECT_GT(b, 0.0);
    EXPECT_LT(b, 1.0);
    for (std::size_t p = 1; p < 40; ++p)
        EXPECT_LE(chernoff_tau_bound(400, p + 1, 2.0, 1.5), chernoff_tau_bound(400, p, 2.0, 1.5));
    EXPECT_THROW(chernoff_tau_bound(400, 20, 2.0, 1.0), DomainError);
    EXPECT_LE(chernoff_tau_bound(10, 1, 0.1, 1.01), 1.0);
}

TEST(Chernoff, MillsBoundOnExceedance) {
    for (double c1 : {2.0, 2.5, 4.0})
        for (std::size_t n : {10, 100, 400, 10000}) {
            EXPECT_NEAR(exceedance_probability(n, c1) / oracle::exceedance(n, c1), 1.0, 1e-12);
            EXPECT_LE(exceedance_probability(n, c1), exceedance_mills_bound(n, c1));
        }
}

TEST(ConditionCheck, Reports) {
    // tau_hat = 1/n never overshoots p/n.
    auto r = thm41_condition_check(0.0, 1.0, 0.5, 400, 20);
    EXPECT_TRUE(r.condition1_holds);
    // g = 1/n, prob_under = 1, p = sqrt(n): ratio 2.
    r = thm41_condition_check(0.0, 1.0, 1.0 / 400.0, 400, 20);
    EXPECT_NEAR(r.condition2_ratio, 2.0, 1e-12);
    EXPECT_FALSE(r.condition2_holds);
    EXPECT_TRUE(thm41_condition_check(0.0, 1.0, 1.0 / 400.0, 400, 20, 2.5).condition2_holds);
    r = thm41_condition_check(1.0, 0.0, 0.5, 10000, 5);
    EXPECT_FALSE(r.condition1_holds);
    EXPECT_THROW(thm41_condition_check(1.5, 0.0, 0.5, 100, 5), DomainError);
}

TEST(VerifySuites, AllPassAndInventory) {
    const auto rows = verify::run_suite("all");
    EXPECT_GE(rows.size(), 12u);
    for (const auto& r : rows) EXPECT_TRUE(r.pass()) << r.suite << '/' << r.check << " slack " << r.worst_slack;
    EXPECT_THROW(verify::run_suite("nope"), DomainError);
}
