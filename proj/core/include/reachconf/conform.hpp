#pragma once

#include "reachconf/goreach.hpp"
#include "reachconf/lp.hpp"

#include <string>
#include <vector>

namespace reachconf {

enum class ConstraintMode {
    Halfspace,
    Generator,
    Auto, ///< halfspace for n_y <= 3, generator otherwise or on degenerate sets
};

const char* to_string(ConstraintMode m);
ConstraintMode constraint_mode_from_string(const std::string& s);

struct ConformanceConfig {
    ConstraintMode mode = ConstraintMode::Auto;
    std::vector<double> weights; ///< w_k per step; missing entries default to 1
    bool verify = true;          ///< post-hoc containment re-check
    double verify_tol = 1e-7;
    optim::LpOptions lp;
    Deadline deadline;

    double weight(int k) const;
};

enum class ConformanceStatus { Conformant, Infeasible, Failed };
const char* to_string(ConformanceStatus s);

struct ConformanceResult {
    Vec alpha;  ///< eta_x + eta_u scaling factors
    Vec cdelta; ///< n_x + n_u center shifts (zero when eliminated)
    double cost = 0.0;
    ConformanceStatus status = ConformanceStatus::Failed;
    double containment_rate = 0.0; ///< training containment, -1 when not verified
    UncertaintySpec spec;          ///< templates with the identified alpha and cdelta
    bool additive = false;         ///< identified with additive output sets only
    int lp_rows = 0;
    int lp_cols = 0;
    ConstraintMode mode_used = ConstraintMode::Generator;
    std::string diagnostics;

    bool conformant() const { return status == ConformanceStatus::Conformant; }
};

/// Template generators of the output deviation set at step k:
/// gen = [Cbar_k G_x, Dbar_{k,0} G_u, ..., Dbar_{k,k} G_u]. Column j of gen is
/// scaled by alpha[alpha_index[j]]; the set center is center_map * cdelta.
struct DeviationSet {
    Mat gen;
    std::vector<int> alpha_index;
    Mat center_map; ///< n_y x (n_x + n_u)
};
DeviationSet deviation_set_matrices(const GOModel& go, const UncertaintySpec& spec, int k);

/// gamma = sum_m sum_k w_k [1^T |Cbar_k G_x|, sum_i 1^T |Dbar_{k,i} G_u|].
Vec cost_vector(const std::vector<GOModel>& gos, const UncertaintySpec& spec, const ConformanceConfig& cfg);

/// Rows P_alpha alpha + P_c cdelta >= rhs, one per facet normal, with the
/// maximum over samples folded into rhs.
struct HalfspaceRows {
    Mat P_alpha;
    Mat P_c;
    Vec rhs;
};
HalfspaceRows halfspace_constraints(const GOModel& go, const TestCase& c, const UncertaintySpec& spec, int k,
                                    const Deadline& deadline = {});

/// Per sample: Q_beta beta + Q_c cdelta = y_a and |beta_j| <= alpha[alpha_index[j]].
struct GeneratorBlock {
    Mat Q_beta;
    Mat Q_c;
    std::vector<Vec> y_a; ///< one per sample
    std::vector<int> alpha_index;
};
GeneratorBlock generator_constraints(const GOModel& go, const TestCase& c, const UncertaintySpec& spec, int k);

/// Solve the conformance LP for prebuilt GO models. `spec` supplies the
/// templates and centers; alpha and cdelta in it are ignored. Entry j of
/// `shift_mask` (length n_x + n_u, or empty for none) makes cdelta_j a free
/// LP variable; all other shifts are fixed at zero.
ConformanceResult identify_white_go(const std::vector<GOModel>& gos, const TestSuite& suite,
                                    const UncertaintySpec& spec, const std::vector<bool>& shift_mask,
                                    const ConformanceConfig& cfg);

/// White-box identification: GO models around the reference trajectories,
/// minimal-cost alpha and (for linear models) cdelta.
ConformanceResult identify_white(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                                 const ConformanceConfig& cfg = {});

/// Baseline that only identifies additive output sets <cdelta_v, diag(alpha_v)>.
ConformanceResult identify_white_additive(const Model& model, const TestSuite& suite,
                                          const UncertaintySpec& spec, const ConformanceConfig& cfg = {});

/// GO model with an extra additive output input channel v: Dbar_{k,k} = [D I].
/// The returned spec uses templates [0; I] for the inputs and none for x0.
GOModel augment_additive(const GOModel& go);
UncertaintySpec additive_spec(const UncertaintySpec& spec, int ny);

std::vector<GOModel> build_gos(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                               RemainderMode mode = RemainderMode::Zero, std::uint64_t seed = 0);

/// Fraction of measurements y^{(m,s)}_k with k >= first_valid inside the
/// reachable sets of the given GO models for the realized sets of `spec`.
double containment_rate(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
                        double tol = 1e-7, bool overapprox = false);

/// Rate on a validation suite for an identified result: GO models are rebuilt
/// around the result's spec with the given remainder mode.
double validation_containment(const Model& model, const ConformanceResult& result, const TestSuite& suite,
                              RemainderMode mode = RemainderMode::Zero, double tol = 1e-7);

/// JSON object with alpha, cdelta, cost, status and containment_rate.
std::string result_json(const ConformanceResult& r);

} // namespace reachconf
