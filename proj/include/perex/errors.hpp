#pragma once

#include <stdexcept>
#include <string>

namespace perex {

/// Input outside the mathematical domain of an operation (pole of the
/// Laplace exponent, invalid model parameters, bad barrier for a case).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A root finder ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The call problem was requested for a model with E[S_1] >= e^r.
class AssumptionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two computations of the same quantity disagreed beyond tolerance.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace perex
