#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace reachconf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error kinds shared across modules. Dimension mismatches use
// std::invalid_argument directly.

class DegenerateSetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SimulationDivergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DifferentiationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a computation exceeds its wall-clock budget.
class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace reachconf
