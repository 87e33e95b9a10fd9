#pragma once

#include <stdexcept>
#include <string>

namespace irsperf {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Parameter combination the requested evaluation path cannot handle
// (e.g. non-half-integer Nakagami shape with the closed-form CDF and
// the quadrature fallback disabled).
class unsupported_parameter : public std::invalid_argument {
public:
    explicit unsupported_parameter(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine could not reach the requested tolerance.  Carries the
// best estimate it achieved so callers can decide whether to use it anyway.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double achieved_estimate, double achieved_error)
        : std::runtime_error(what), estimate(achieved_estimate), error(achieved_error) {}
    double estimate;
    double error;
};

// Two internal evaluation routes disagreed beyond tolerance.
class consistency_error : public std::runtime_error {
public:
    explicit consistency_error(const std::string& what) : std::runtime_error(what) {}
};

// An intermediate quantity violated a validity assumption of a formula
// (e.g. a surrogate expectation turning nonpositive).
class numerical_validity_error : public std::runtime_error {
public:
    explicit numerical_validity_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace irsperf
