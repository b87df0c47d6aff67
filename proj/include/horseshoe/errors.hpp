#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace horseshoe {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Any failure of a numerical routine (quadrature, series, sampler).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureFailure : public NumericalError {
public:
    QuadratureFailure(const std::string& what, double partial_estimate, double error_bound)
        : NumericalError(what), partial_estimate_(partial_estimate), error_bound_(error_bound) {}

    double partial_estimate() const noexcept { return partial_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double partial_estimate_;
    double error_bound_;
};

class SeriesFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two algebraically equivalent routes disagree by more than round-off allows.
class InconsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The Gibbs sampler produced a non-finite state.
class SamplerDivergence : public NumericalError {
public:
    SamplerDivergence(const std::string& what, std::size_t iteration)
        : NumericalError(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// The counting estimator found no exceedances and truncation is off.
class DegenerateEstimate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A replicate of an experiment failed; wraps the original message.
class ReplicateFailure : public NumericalError {
public:
    ReplicateFailure(const std::string& what, std::size_t replicate)
        : NumericalError(what), replicate_(replicate) {}

    std::size_t replicate() const noexcept { return replicate_; }

private:
    std::size_t replicate_;
};

}  // namespace horseshoe
