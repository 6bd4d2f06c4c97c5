#pragma once

#include "reachconf/deadline.hpp"
#include "reachconf/types.hpp"

#include <Eigen/Sparse>

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace reachconf::optim {

using SparseMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// min objective^T x  s.t.  ineq x <= ineq_rhs,  eq x = eq_rhs,  lower <= x <= upper.
struct LinearProgram {
    Vec objective;
    SparseMat ineq;
    Vec ineq_rhs;
    SparseMat eq;
    Vec eq_rhs;
    Vec lower; ///< -inf allowed
    Vec upper; ///< +inf allowed

    Eigen::Index num_vars() const { return objective.size(); }
    Eigen::Index num_rows() const { return ineq.rows() + eq.rows(); }

    /// Throws std::invalid_argument on inconsistent dimensions or non-finite
    /// objective entries.
    void validate() const;
};

/// Incremental row-wise construction of a LinearProgram.
class LpBuilder {
public:
    int add_var(double cost, double lower = 0.0, double upper = kInf);
    int num_vars() const { return static_cast<int>(cost_.size()); }

    void add_le(const std::vector<std::pair<int, double>>& terms, double rhs);
    void add_ge(const std::vector<std::pair<int, double>>& terms, double rhs);
    void add_eq(const std::vector<std::pair<int, double>>& terms, double rhs);

    int num_ineq() const { return static_cast<int>(ineq_rhs_.size()); }
    int num_eq() const { return static_cast<int>(eq_rhs_.size()); }

    LinearProgram build() const;

private:
    std::vector<double> cost_, lower_, upper_;
    std::vector<Eigen::Triplet<double>> ineq_, eq_;
    std::vector<double> ineq_rhs_, eq_rhs_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);

enum class LpAlgorithm {
    Auto,   ///< dual simplex when the slack basis is dual feasible, else primal
    Primal,
    Dual,
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    int max_iterations = 0; ///< 0 selects a size-dependent default
    int refactor_interval = 64;
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    int degenerate_switch = 50;
    bool bland_only = false;
    bool scale = true;
    LpAlgorithm algorithm = LpAlgorithm::Auto;
    Deadline deadline;
};

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    Vec x;
    double objective = kInf;
    int iterations = 0;
    int bland_iterations = 0;
    std::string diagnostics;

    bool optimal() const { return status == LpStatus::Optimal; }
};

/// Bounded revised simplex (sparse LU of the basis kernel, product-form
/// updates). Dantzig pricing with a fallback to Bland's rule on stalling.
/// Throws TimeoutError when the deadline in `options` expires.
LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

} // namespace reachconf::optim
