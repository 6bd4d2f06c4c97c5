#pragma once

#include "reachconf/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace reachconf {

enum class JacobianMode { Analytic, FiniteDifference };

/// Upper bounds on |second derivatives| over a box. For every output
/// component i the returned matrix M_i satisfies |d^2 h_i / dz_a dz_b| <= M_i(a, b)
/// for all z in [lo, hi].
using HessianBound = std::function<std::vector<Mat>(const Vec& lo, const Vec& hi, const Vec& p)>;

/// x_{k+1} = f(x_k, u_k, p),  y_k = g(x_k, u_k, p).
struct StateSpaceModel {
    using Map = std::function<Vec(const Vec& x, const Vec& u, const Vec& p)>;
    using Jacobian = std::function<void(const Vec& x, const Vec& u, const Vec& p, Mat& dx, Mat& du)>;

    std::string name;
    int nx = 0, nu = 0, ny = 0;
    Vec p;
    std::vector<std::string> param_names;
    Map f, g;
    Jacobian jac_f, jac_g; ///< optional analytic Jacobians
    HessianBound hess_f, hess_g; ///< optional, over z = [x; u]
    JacobianMode jacobian_mode = JacobianMode::FiniteDifference;
    bool linear = false;
    double dt = 0.0; ///< Euler step when built by discretize_euler, else 0
};

/// y_k = f(y_{k-n_p..k-1}, u_{k-n_p..k}, p).
///
/// Windows are matrices with one column per time step, oldest first: the
/// output window is n_y x n_p and the input window n_u x (n_p + 1) with the
/// last column holding u_k.
struct NarxModel {
    using Map = std::function<Vec(const Mat& ywin, const Mat& uwin, const Vec& p)>;
    /// dy[i-1] = df/dy_{k-i} (i = 1..n_p), du[i] = df/du_{k-i} (i = 0..n_p).
    using Jacobian = std::function<void(const Mat& ywin, const Mat& uwin, const Vec& p,
                                        std::vector<Mat>& dy, std::vector<Mat>& du)>;

    std::string name;
    int np = 1, nu = 0, ny = 0;
    Vec p;
    std::vector<std::string> param_names;
    Map f;
    Jacobian jac;
    /// Over z = [vec(ywin); vec(uwin)] (column-major stacking of the windows).
    HessianBound hess;
    JacobianMode jacobian_mode = JacobianMode::FiniteDifference;
    bool linear = false;
};

using Model = std::variant<StateSpaceModel, NarxModel>;

bool is_narx(const Model& m);
bool is_linear(const Model& m);
int num_inputs(const Model& m);
int num_outputs(const Model& m);
/// Order n_p for NARX models, 0 for state-space models.
int model_order(const Model& m);
const Vec& params(const Model& m);
const std::string& model_name(const Model& m);
Model with_params(const Model& m, const Vec& p);

/// One test case: nominal initial state (empty for NARX), nominal inputs
/// (n_u x n_k) and sampled output trajectories (each n_y x n_k).
struct TestCase {
    Vec nominal_x0;
    Mat nominal_u;
    std::vector<Mat> samples;

    int num_steps() const { return static_cast<int>(nominal_u.cols()); }
    int num_samples() const { return static_cast<int>(samples.size()); }
};

struct TestSuite {
    std::vector<TestCase> cases;

    int num_cases() const { return static_cast<int>(cases.size()); }
    /// Throws std::invalid_argument when sample shapes disagree.
    void validate(int ny) const;
};

/// Realized sets X0 = <c_x + cdelta_x, G_x diag(alpha_x)> and
/// U = <c_u + cdelta_u, G_u diag(alpha_u)>.
struct UncertaintySpec {
    Vec c_x, c_u;
    Mat G_x, G_u;
    Vec alpha_x, alpha_u;
    Vec cdelta_x, cdelta_u;

    int eta_x() const { return static_cast<int>(G_x.cols()); }
    int eta_u() const { return static_cast<int>(G_u.cols()); }

    /// Identity templates, zero centers, unit scaling, no shift.
    static UncertaintySpec identity(int nx, int nu);
    void validate() const;

    Vec alpha() const;
    void set_alpha(const Vec& a);
    Vec cdelta() const;
    void set_cdelta(const Vec& c);
};

/// x_{k+1} = x_k + dt * h(x_k, u_k, p). The Jacobian and Hessian bound of h,
/// when given, are carried over to f.
struct ContinuousDynamics {
    int nx = 0, nu = 0;
    StateSpaceModel::Map h;
    StateSpaceModel::Jacobian jac_h;
    HessianBound hess_h;
};
StateSpaceModel discretize_euler(const ContinuousDynamics& dyn, double dt);

/// Output trajectory (n_y x n_k) of a state-space model. Throws
/// SimulationDivergedError on non-finite values.
Mat simulate(const StateSpaceModel& m, const Vec& x0, const Mat& u);

/// NARX output trajectory (n_y x n_k) whose first n_p columns are `initial`.
Mat simulate(const NarxModel& m, const Mat& initial, const Mat& u);

struct SsJacobians {
    Mat A, B, C, D;
};
SsJacobians jacobians_ss(const StateSpaceModel& m, const Vec& x, const Vec& u);

struct NarxJacobians {
    std::vector<Mat> A; ///< A[i-1] = df/dy_{k-i}, i = 1..n_p
    std::vector<Mat> B; ///< B[i] = df/du_{k-i}, i = 0..n_p
};
NarxJacobians jacobians_narx(const NarxModel& m, const Mat& ywin, const Mat& uwin);

/// Central-difference Jacobian of h at z with step 1e-6 (1 + |z_i|).
Mat finite_difference(const std::function<Vec(const Vec&)>& h, const Vec& z);

/// Largest relative deviation between analytic and finite-difference
/// Jacobians at (x, u); 0 when no analytic Jacobian is available.
double jacobian_mismatch(const StateSpaceModel& m, const Vec& x, const Vec& u);
double jacobian_mismatch(const NarxModel& m, const Mat& ywin, const Mat& uwin);

} // namespace reachconf
