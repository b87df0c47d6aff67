#pragma once

#include <cmath>
#include <cstdlib>

namespace horseshoe {

/// A positive real stored as mantissa * exp(log_scale).
///
/// Integrals carrying a factor exp(y^2 / 2 sigma^2) overflow a double long
/// before the quantities built from them do, so they are returned in this
/// form and only ratios or products with exp(-xi) are ever collapsed.
///
/// Normalizing the mantissa moves whole decades out of it. Those are kept as
/// an integer next to the caller's exponent rather than added into it: at
/// xi ~ 1e13 a single rounding of log_scale is already a relative error of
/// 1e-3 in the value, and scaled_value(-xi) must cancel xi exactly.
class ExponentScaledValue {
public:
    constexpr ExponentScaledValue() = default;

    ExponentScaledValue(double mantissa, double log_scale)
        : mantissa_(mantissa), base_(log_scale) {
        normalize();
    }

    double mantissa() const noexcept { return mantissa_; }
    double log_scale() const noexcept { return base_ + decades_ * kLn10; }

    /// Natural log of the represented value; -inf for zero.
    double log() const noexcept {
        return mantissa_ > 0.0 ? (std::log(mantissa_) + decades_ * kLn10) + base_ : -HUGE_VAL;
    }

    /// Collapses to a double; may overflow to +inf, which is the caller's call.
    double value() const noexcept { return scaled_value(0.0); }

    /// value() * exp(shift) without forming exp(log_scale) on its own.
    double scaled_value(double shift) const noexcept {
        if (mantissa_ == 0.0) return 0.0;
        return collapse(mantissa_, decades_, base_ + shift);
    }

    friend ExponentScaledValue operator*(const ExponentScaledValue& a, const ExponentScaledValue& b) {
        ExponentScaledValue r(a.mantissa_ * b.mantissa_, a.base_ + b.base_);
        r.decades_ += a.decades_ + b.decades_;
        return r;
    }

    friend double operator/(const ExponentScaledValue& a, const ExponentScaledValue& b) {
        return collapse(a.mantissa_ / b.mantissa_, a.decades_ - b.decades_, a.base_ - b.base_);
    }

private:
    static double collapse(double m, long decades, double exponent) noexcept {
        if (std::labs(decades) <= 300) return (m * std::pow(10.0, static_cast<double>(decades))) * std::exp(exponent);
        return m * std::exp(exponent + decades * kLn10);
    }

    // Keeps the mantissa in (0.1, 10]; powers of ten move into decades_.
    void normalize() noexcept {
        if (!(mantissa_ > 0.0) || !std::isfinite(mantissa_)) {
            if (mantissa_ == 0.0) base_ = 0.0, decades_ = 0;
            return;
        }
        if (mantissa_ > 0.1 && mantissa_ <= 10.0) return;
        long d = static_cast<long>(std::floor(std::log10(mantissa_)));
        mantissa_ /= std::pow(10.0, static_cast<double>(d));
        // log10 can be off by one ulp around exact powers of ten.
        while (mantissa_ > 10.0) { mantissa_ /= 10.0; ++d; }
        while (mantissa_ <= 0.1) { mantissa_ *= 10.0; --d; }
        decades_ += d;
    }

    static constexpr double kLn10 = 2.302585092994045684017991454684364208;

    double mantissa_ = 0.0;
    double base_ = 0.0;
    long decades_ = 0;
};

}  // namespace horseshoe
