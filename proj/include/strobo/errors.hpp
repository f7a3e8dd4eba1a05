#pragma once

#include <stdexcept>
#include <string>

namespace strobo {

// Caller broke a documented precondition (dimension mismatch, bad parameter).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested construction does not apply to this system (e.g. a closed-form
// propagator for a non-quadratic Hamiltonian).
class UnsupportedSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedQuery : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension or memory cap exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid too coarse for the requested operator.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace strobo
