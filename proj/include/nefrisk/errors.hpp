#pragma once

#include <stdexcept>
#include <string>

namespace nefrisk {

// Parameter outside a family's domain (mean, natural parameter, count).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A two-moment fit has no solution inside the family.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sampler or estimator failure at run time (iteration caps, weight overflow,
// infeasible tilt).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An accept-reject ratio exceeded one: the dominating constant is wrong.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace nefrisk
