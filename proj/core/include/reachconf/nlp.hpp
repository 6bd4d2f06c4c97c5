#pragma once

#include "reachconf/deadline.hpp"
#include "reachconf/types.hpp"

#include <cstdint>
#include <functional>

namespace reachconf::optim {

/// Unconstrained or box-constrained minimization of a black-box objective.
/// Non-finite objective values are treated as +inf.
struct NlpProblem {
    std::function<double(const Vec&)> objective;
    Vec x0;
    Vec lower; ///< empty means unbounded
    Vec upper; ///< empty means unbounded

    int max_evaluations = 2000;
    double xtol = 1e-8;  ///< simplex diameter (infinity norm)
    double ftol = 1e-10; ///< spread of function values over the simplex
    double initial_step = 0.1;
    int restarts = 3;
    Deadline deadline;
};

struct NlpResult {
    Vec x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive Nelder-Mead with restarts from perturbed copies of the incumbent.
/// Deterministic for a given seed. The returned value never exceeds the
/// objective at x0.
NlpResult solve_nlp(const NlpProblem& problem, std::uint64_t seed);

} // namespace reachconf::optim
