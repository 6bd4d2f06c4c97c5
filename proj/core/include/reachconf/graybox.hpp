#pragma once

#include "reachconf/conform.hpp"
#include "reachconf/nlp.hpp"

#include <cstdint>
#include <optional>

namespace reachconf {

enum class GrayScheme { Simultaneous, Sequential, SequentialLS };

const char* to_string(GrayScheme s);

struct GrayboxConfig {
    GrayScheme scheme = GrayScheme::Sequential;
    /// Initial parameter guess; empty draws each entry from N(0, 0.01^2).
    Vec p0;
    /// Also search the nominal input center c_u (starting from spec.c_u).
    bool estimate_input_center = false;
    int max_evaluations = 600;
    int restarts = 3;
    double initial_step = 0.5;
    std::uint64_t seed = 0;
    ConformanceConfig conform;
    Deadline deadline;
};

struct GrayboxResult {
    Vec p;
    Vec c_u; ///< input center used by the final identification
    ConformanceResult white;
    double nlp_value = 0.0;
    int evaluations = 0;
    std::optional<double> rmse_p;
};

/// l_U = sum_m sum_k w_k 1^T max_s |y_a - y_delta| with y_delta the output
/// shift caused by spec's cdelta when `use_shift`, else zero.
double cost_under(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
                  const ConformanceConfig& cfg, bool use_shift);

/// l_LS = sum_m sum_k w_k 1^T sum_s (y_a - y_delta)^2.
double cost_ls(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
               const ConformanceConfig& cfg, bool use_shift);

/// Gray-box identification of parameters and uncertainty sets. The returned
/// uncertainty sets always come from a final white-box identification at the
/// estimated parameters.
GrayboxResult identify_gray(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                            const GrayboxConfig& cfg);

double parameter_rmse(const Vec& estimate, const Vec& truth);

/// Conformance JSON extended with "p" and "rmse_p".
std::string gray_result_json(const GrayboxResult& r);

} // namespace reachconf
