#pragma once

#include "reachconf/blackbox.hpp"
#include "reachconf/graybox.hpp"
#include "reachconf/harness.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reachconf {

enum class Method { White, WhiteAdd, GraySeq, GraySeq2, GraySim, BlackGP, BlackCGP };

const char* to_string(Method m);
Method method_from_string(const std::string& s);
bool is_blackbox(Method m);

struct Profile {
    std::string name = "desk";
    int suites = 10;
    int nm = 20;
    int ns = 10;
    int extra_steps = 6;        ///< n_k = n_p + extra_steps
    int validation_cases = 5;
    int validation_samples = 20;
    int gray_evaluations = 2000;
    int train1_cases = 60;      ///< black-box least-squares data
    int train2_cases = 20;      ///< black-box conformance data
    int subsets = 4;
    int gp_population = 60;
    int gp_generations = 20;
    int cgp_population = 20;
    int cgp_generations = 3;

    static Profile desk();
    static Profile paper();
    static Profile from_name(const std::string& name);
    EvolutionConfig evolution(int np, std::uint64_t seed) const;
};

/// Everything one comparison suite needs: data, truth and identification spec.
struct ProblemInstance {
    SystemSetup system;
    UncertaintySpec truth;
    UncertaintySpec estimate; ///< spec handed to white and gray-box methods
    TestSuite conformance;    ///< identification data
    TestSuite validation;
    double true_cost = 0.0;
    std::uint64_t seed = 0;

    // Black-box data, present for systems identified as NARX models by GP.
    int np = 0;
    UncertaintySpec bb_estimate; ///< input templates only, zero centers
    TestSuite train1, train2, bb_conformance, bb_validation;
    double bb_true_cost = 0.0;   ///< true cost over steps k >= n_p
    bool has_blackbox() const { return np > 0; }
};

/// Order used when a system is identified as a NARX model by the black-box
/// methods; 0 for systems outside the black-box study.
int blackbox_order(const std::string& system);

ProblemInstance make_instance(const std::string& system, const Profile& profile, std::uint64_t seed);

struct MethodOutcome {
    Method method = Method::White;
    ConformanceResult result;
    double normalized_cost = 0.0;
    bool failed = false;
    double seconds = 0.0;
    std::optional<Vec> p;
    std::optional<double> rmse_p;
    std::string model_text;
    double validation_containment = 0.0;
};

MethodOutcome run_method(Method method, const ProblemInstance& inst, const Profile& profile,
                         const ConformanceConfig& conform = {});

/// Result JSON of an outcome (wall time excluded).
std::string outcome_json(const MethodOutcome& o);

struct MetricsRow {
    std::string system;
    std::string method;
    int suite = 0;
    double normalized_cost = 0.0;
    bool failed = false;
    double seconds = 0.0;
    std::optional<double> rmse_p;
    double validation_containment = 0.0;
};

struct ComparisonConfig {
    std::vector<std::string> systems = {"pedestrian_ss", "pedestrian_arx", "lorenz", "narx1"};
    std::vector<Method> methods = {Method::White,   Method::WhiteAdd, Method::GraySeq, Method::GraySeq2,
                                   Method::GraySim, Method::BlackGP,  Method::BlackCGP};
    Profile profile;
    std::uint64_t seed = 1;
};

/// One row per (system, suite, method). Black-box methods run only on the
/// nonlinear systems and gray-box methods only where parameters exist.
std::vector<MetricsRow> comparison_experiment(const ComparisonConfig& cfg);

struct SummaryRow {
    std::string method;
    double mean_normalized_cost = 0.0; ///< over non-failures
    double median_normalized_cost = 0.0;
    double median_ranked = 0.0;        ///< over all runs, failures ranked as +inf
    double failure_rate = 0.0;         ///< percent
    double mean_seconds = 0.0;
    std::optional<double> mean_rmse_p;
    int runs = 0;
};
std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows, const std::string& system = "");

std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
/// Per-suite normalized costs of non-failures: system,method,suite,normalized_cost.
std::string boxplot_csv(const std::vector<MetricsRow>& rows);

struct ScalabilityPoint {
    int nk = 4, nm = 10, ns = 1, ny = 3;
};
struct ScalabilityRow {
    ScalabilityPoint point;
    std::optional<double> halfspace_seconds; ///< empty when the cutoff was hit
    std::optional<double> generator_seconds;
};
struct ScalabilityConfig {
    std::vector<ScalabilityPoint> points;
    double cutoff_seconds = 60.0;
    int repeats = 3;
    double min_total_seconds = 0.5; ///< short runs repeat (at most 50 times) until this much time is spent
    std::uint64_t seed = 1;

    /// The sweep of the water-tank timing table.
    static ScalabilityConfig table(double cutoff = 60.0);
};
/// Median wall time of white-box identification in both constraint modes on
/// water-tank suites; post-hoc verification is disabled.
std::vector<ScalabilityRow> scalability_experiment(const ScalabilityConfig& cfg);
std::string scalability_csv(const std::vector<ScalabilityRow>& rows);

struct VehicleConfig {
    int train_cases = 84, train_steps = 6, train_samples = 1;
    int validation_cases = 304, validation_steps = 10;
    std::vector<double> epsilons = {1.0, 1.2, 2.0, 3.0};
    std::uint64_t seed = 1;
};
struct VehicleReport {
    ConformanceResult identified;
    UncertaintySpec truth;
    std::vector<std::pair<double, double>> containment; ///< (eps, validation rate)
};
/// Synthetic stand-in for the recorded vehicle data: ground-truth sets from
/// the identified magnitudes, random split into identification and validation.
VehicleReport vehicle_experiment(const VehicleConfig& cfg);
UncertaintySpec vehicle_truth();

} // namespace reachconf
