#pragma once

#include "reachconf/conform.hpp"
#include "reachconf/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reachconf {

/// Ranges for nominal initial states (or NARX initial windows) and inputs.
struct OperatingRange {
    double x_lo = -1.0, x_hi = 1.0;
    double u_lo = -1.0, u_hi = 1.0;
};

struct SystemSetup {
    std::string id;
    Model model;
    OperatingRange range;
    double center_range = 1.0;    ///< true set centers uniform in [-c, c]
    double generator_range = 0.25; ///< true diagonal generators uniform in [-g, g]
    /// Probability that an uncertainty draw takes lambda from the vertices
    /// {-1, 1}^eta instead of uniformly from the box.
    double vertex_fraction = 0.5;
    /// Input channels that carry a signal; the others are identically zero
    /// (no nominal value, no uncertainty). Empty means all channels.
    std::vector<bool> active_inputs;

    bool input_active(int i) const { return active_inputs.empty() || active_inputs[static_cast<std::size_t>(i)]; }
};

/// Catalog model plus the experimental setup used for it.
SystemSetup system_setup(const std::string& id);

/// Random true sets: centers uniform in [-c, c] and diagonal generator
/// matrices with entries uniform in [-g, g]; alpha = 1 and no shift. NARX
/// models get no initial-state set.
UncertaintySpec draw_true_spec(const SystemSetup& sys, Rng& rng);

/// Draw a point of the zonotope <c, G diag(alpha)>: with probability
/// `vertex_fraction` lambda is a random vertex of [-1, 1]^eta, otherwise
/// uniform in the box.
Vec sample_zonotope(const Vec& c, const Mat& G, const Vec& alpha, Rng& rng, double vertex_fraction = 0.0);

/// One state-space test case with `ns` sampled trajectories around the
/// nominal initial state and inputs.
TestCase sample_case(const StateSpaceModel& m, const UncertaintySpec& truth, const Vec& x0, const Mat& u, int ns,
                     Rng& rng, double vertex_fraction);

/// Simulated suite: nominal values uniform in the operating range,
/// uncertainties sampled from the realized true sets. Cases whose
/// simulation diverges are redrawn (at most 20 times).
TestSuite generate_suite(const SystemSetup& sys, const UncertaintySpec& truth, int nm, int nk, int ns,
                         std::uint64_t seed);

/// Identification spec built from the truth: correct templates with alpha = 1
/// and centers either taken from the truth or drawn from N(0, 0.01^2).
UncertaintySpec estimation_spec(const UncertaintySpec& truth, bool centers_known, Rng& rng);

/// l_C of the true model and true sets on a suite.
double true_cost(const Model& model, const UncertaintySpec& truth, const TestSuite& suite,
                 const ConformanceConfig& cfg = {});

/// ratio of an identified cost to the true cost; +inf for failures.
double normalized_cost(const ConformanceResult& r, double true_cost_value);

/// Failure as in the comparison study: not conformant or normalized cost above 100.
bool is_failure(const ConformanceResult& r, double normalized);

/// Multiply alpha by a safety factor eps >= 1.
ConformanceResult scale_uncertainty(const ConformanceResult& r, double eps);

} // namespace reachconf
