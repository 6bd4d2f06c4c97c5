#pragma once

#include "reachconf/models.hpp"
#include "reachconf/setops.hpp"

#include <cstdint>
#include <utility>

namespace reachconf {

enum class RemainderMode { Zero, IntervalHessian, Sampled };

const char* to_string(RemainderMode m);
RemainderMode remainder_mode_from_string(const std::string& s);

/// Linear surrogate of one test case around its reference trajectory:
///   y_k ~ ybar_k + Cbar_k dx_0 + sum_{i<=k} Dbar_{k,i} du_i  (+ remainder E_k).
/// For NARX models dx_0 is the deviation of the stacked initial output window
/// and entries with k < first_valid are only reference outputs.
struct GOModel {
    int nk = 0;
    int ny = 0;
    int nx = 0; ///< state (or lifted window) dimension
    int nu = 0;
    int first_valid = 0;
    bool narx = false;
    bool remainder_rigorous = true;

    std::vector<Vec> ybar;
    std::vector<Mat> Cbar;
    std::vector<std::vector<Mat>> Dbar; ///< Dbar[k][i], i = 0..k
    std::vector<Zonotope> remainder;

    Vec xbar0; ///< reference initial state or stacked reference window
    Mat ubar;  ///< reference inputs, n_u x n_k

    /// Linearization along the reference. State-space: A_k, B_k, C_k, D_k.
    /// NARX: lin_A[k] is the lifted window transition, lin_C[k] the output
    /// row [A_{k,n_p} .. A_{k,1}] and lin_B[k][i] = B_{k,i}.
    std::vector<Mat> lin_A, lin_C, lin_D;
    std::vector<std::vector<Mat>> lin_B;
};

/// xbar_0 = nominal_x0 + c_x and ubar_i = nominal_u_i + c_u.
std::pair<Vec, Mat> reference_trajectory(const TestCase& c, const UncertaintySpec& spec);

/// Stacked reference window of a NARX case: the mean over samples of the
/// first n_p measurements, oldest first.
Vec reference_window(const TestCase& c, int np);

GOModel go_from_statespace(const StateSpaceModel& m, const TestCase& c, const UncertaintySpec& spec,
                           RemainderMode mode = RemainderMode::Zero, std::uint64_t seed = 0);
GOModel go_from_narx(const NarxModel& m, const TestCase& c, const UncertaintySpec& spec,
                     RemainderMode mode = RemainderMode::Zero, std::uint64_t seed = 0);
GOModel build_go(const Model& m, const TestCase& c, const UncertaintySpec& spec,
                 RemainderMode mode = RemainderMode::Zero, std::uint64_t seed = 0);

/// Enclosures E_k of the linearization error for the realized sets of `spec`.
/// Zero mode returns points at the origin. IntervalHessian needs analytic
/// Hessian bounds (UnsupportedModeError otherwise). Sampled inflates the
/// largest observed error over simulated realizations by 1.2 and marks the
/// model non-rigorous.
std::vector<Zonotope> remainder_enclosure(const Model& m, GOModel& go, const TestCase& c,
                                          const UncertaintySpec& spec, RemainderMode mode,
                                          std::uint64_t seed = 0, int num_samples = 200);

/// Reachable output set of the GO model at step k for the realized sets of
/// `spec`; with `overapprox` the remainder E_k is added.
Zonotope reach_go(const GOModel& go, const UncertaintySpec& spec, int k, bool overapprox = false);

/// y_a = y^{(s)}_k - ybar_k. For NARX cases the known deviation of the
/// sample's measured initial window from the reference window is removed
/// through Cbar_k.
Vec measurement_deviation(const GOModel& go, const TestCase& c, int s, int k);

} // namespace reachconf
