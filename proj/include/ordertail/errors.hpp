#pragma once

#include <stdexcept>
#include <string>

namespace ordertail {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid model, weight or plan parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of its evaluation budget.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Root bracketing or an iterative sampler failed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo estimator precondition on the sample budget.
class SampleSizeError : public Error {
public:
    using Error::Error;
};

}  // namespace ordertail
