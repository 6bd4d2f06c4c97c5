#include "reachconf/catalog.hpp"
#include "reachconf/experiments.hpp"
#include "reachconf/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

using namespace reachconf;
namespace fs = std::filesystem;

namespace {

std::string out_path(const std::string& dir, const std::string& file)
{
    fs::create_directories(dir);
    return (fs::path(dir) / file).string();
}

io::IdentifiedModel identified(const std::string& system, const MethodOutcome& o)
{
    io::IdentifiedModel m;
    m.system = system;
    m.method = to_string(o.method);
    m.p = o.p;
    m.narx = o.model_text;
    m.result = o.result;
    return m;
}

MetricsRow metrics_row(const std::string& system, const MethodOutcome& o)
{
    MetricsRow r;
    r.system = system;
    r.method = to_string(o.method);
    r.normalized_cost = o.normalized_cost;
    r.failed = o.failed;
    r.seconds = o.seconds;
    r.rmse_p = o.rmse_p;
    r.validation_containment = o.validation_containment;
    return r;
}

// Spec for suites read from disk: identity templates around zero centers.
UncertaintySpec default_spec(const Model& model, const TestSuite& suite)
{
    int nx = 0;
    if (!is_narx(model))
        nx = std::get<StateSpaceModel>(model).nx;
    if (!suite.cases.empty() && suite.cases.front().nominal_x0.size() == 0)
        nx = 0;
    return UncertaintySpec::identity(nx, num_inputs(model));
}

int cmd_identify(const std::string& system, const std::string& method_name, const std::string& suite_arg,
                 const std::string& constraints, std::uint64_t seed, const std::string& profile_name,
                 const std::string& out)
{
    const auto method = method_from_string(method_name);
    const auto profile = Profile::from_name(profile_name);
    ConformanceConfig conform;
    conform.mode = constraint_mode_from_string(constraints);

    ProblemInstance inst = make_instance(system, profile, seed);
    const bool generated = suite_arg == "generate";
    if (!generated) {
        auto suite = io::suite_from_json(io::read_file(suite_arg));
        inst.estimate = default_spec(inst.system.model, suite);
        inst.conformance = suite;
        inst.validation = suite;
        if (inst.has_blackbox()) {
            for (auto* s : {&inst.train1, &inst.train2, &inst.bb_conformance, &inst.bb_validation}) {
                *s = suite;
                for (auto& c : s->cases)
                    c.nominal_x0.resize(0);
            }
        }
    }
    auto o = run_method(method, inst, profile, conform);
    auto row = metrics_row(system, o);
    row.suite = 0;
    if (!generated) {
        row.normalized_cost = std::numeric_limits<double>::quiet_NaN();
        row.failed = !o.result.conformant();
    }

    auto model = nlohmann::ordered_json::parse(io::model_to_json(identified(system, o)));
    model["seed"] = seed;
    model["suite"] = generated ? "generate" : suite_arg;
    if (generated) {
        model["normalized_cost"] = std::isfinite(o.normalized_cost) ? nlohmann::ordered_json(o.normalized_cost)
                                                                    : nlohmann::ordered_json(nullptr);
        model["failed"] = o.failed;
    }
    if (o.rmse_p)
        model["rmse_p"] = *o.rmse_p;
    model["validation_containment"] = o.validation_containment;
    io::write_file(out_path(out, "result.json"), model.dump(2));
    io::write_file(out_path(out, "metrics.csv"), metrics_csv({row}));
    if (generated) {
        io::write_file(out_path(out, "suite.json"), io::suite_to_json(inst.conformance));
        io::write_file(out_path(out, "validation.json"), io::suite_to_json(inst.validation));
    }
    std::cout << to_string(method) << " on " << system << ": " << to_string(o.result.status);
    if (std::isfinite(o.result.cost))
        std::cout << ", cost " << o.result.cost;
    if (generated && std::isfinite(o.normalized_cost))
        std::cout << ", normalized cost " << o.normalized_cost;
    std::cout << "\n";
    return o.result.conformant() ? 0 : 2;
}

int cmd_validate(const std::string& model_path, const std::string& suite_path, double eps, const std::string& out)
{
    const auto m = io::model_from_json(io::read_file(model_path));
    const auto suite = io::suite_from_json(io::read_file(suite_path));
    const auto model = io::instantiate(m);
    const auto scaled = scale_uncertainty(m.result, eps);
    double rate = 0.0;
    try {
        rate = validation_containment(model, scaled, suite);
    } catch (const SimulationDivergedError&) {
        rate = 0.0;
    }
    nlohmann::ordered_json j;
    j["model"] = model_path;
    j["suite"] = suite_path;
    j["epsilon"] = eps;
    j["containment_rate"] = rate;
    if (!out.empty())
        io::write_file(out_path(out, "validation.json"), j.dump(2));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_generate(const std::string& system, int nm, int nk, int ns, std::uint64_t seed, const std::string& out)
{
    const auto sys = system_setup(system);
    Rng rng(sub_seed(seed, 0));
    const auto truth = draw_true_spec(sys, rng);
    if (nk <= 0)
        nk = model_order(sys.model) + 6;
    const auto suite = generate_suite(sys, truth, nm, nk, ns, sub_seed(seed, 1));
    io::write_file(out_path(out, "suite.json"), io::suite_to_json(suite));
    io::write_file(out_path(out, "truth.json"), io::spec_to_json(truth));
    std::cout << "wrote " << suite.num_cases() << " test cases to " << out << "\n";
    return 0;
}

int cmd_bench(const std::string& which, const std::string& profile_name, std::uint64_t seed, double cutoff,
              int suites, const std::vector<std::string>& systems, const std::vector<std::string>& methods,
              const std::string& out)
{
    if (which == "scalability") {
        auto cfg = ScalabilityConfig::table(cutoff);
        cfg.seed = seed;
        const auto rows = scalability_experiment(cfg);
        const auto csv = scalability_csv(rows);
        io::write_file(out_path(out, "scalability.csv"), csv);
        std::cout << csv;
        return 0;
    }
    if (which == "comparison") {
        ComparisonConfig cfg;
        cfg.profile = Profile::from_name(profile_name);
        if (suites > 0)
            cfg.profile.suites = suites;
        cfg.seed = seed;
        if (!systems.empty())
            cfg.systems = systems;
        if (!methods.empty()) {
            cfg.methods.clear();
            for (const auto& m : methods)
                cfg.methods.push_back(method_from_string(m));
        }
        const auto rows = comparison_experiment(cfg);
        io::write_file(out_path(out, "metrics.csv"), metrics_csv(rows));
        io::write_file(out_path(out, "boxplot.csv"), boxplot_csv(rows));
        for (const auto& s : cfg.systems) {
            const auto sum = summary_csv(summarize(rows, s));
            std::cout << "# " << s << "\n" << sum;
        }
        const auto overall = summary_csv(summarize(rows));
        io::write_file(out_path(out, "summary.csv"), overall);
        std::cout << "# all systems\n" << overall;
        return 0;
    }
    if (which == "vehicle") {
        VehicleConfig cfg;
        cfg.seed = seed;
        const auto rep = vehicle_experiment(cfg);
        std::string csv = "epsilon,containment_rate\n";
        for (const auto& [eps, rate] : rep.containment)
            csv += std::to_string(eps) + "," + std::to_string(rate) + "\n";
        io::write_file(out_path(out, "vehicle.csv"), csv);
        io::IdentifiedModel m;
        m.system = "vehicle";
        m.method = "white";
        m.result = rep.identified;
        io::write_file(out_path(out, "vehicle_model.json"), io::model_to_json(m));
        std::cout << csv;
        return 0;
    }
    throw std::invalid_argument("unknown benchmark: " + which);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reachset-conformant system identification"};
    app.require_subcommand(1);

    auto* identify = app.add_subcommand("identify", "Identify a conformant model for one test suite");
    std::string system = "pedestrian_ss", method = "white", suite = "generate", constraints = "auto",
                profile = "desk", out = "out";
    std::uint64_t seed = 1;
    identify->add_option("--system", system, "Catalog system id")->required();
    identify->add_option("--method", method, "white|whiteadd|grayseq|grayseq2|graysim|blackgp|blackcgp");
    identify->add_option("--suite", suite, "Suite JSON path, or 'generate'");
    identify->add_option("--constraints", constraints, "halfspace|generator|auto");
    identify->add_option("--seed", seed, "Random seed");
    identify->add_option("--profile", profile, "desk|paper");
    identify->add_option("--out", out, "Output directory");

    auto* bench = app.add_subcommand("bench", "Run an experiment sweep");
    std::string which;
    double cutoff = 60.0;
    int suites = 0;
    std::vector<std::string> systems, methods;
    bench->add_option("which", which, "scalability|comparison|vehicle")->required();
    bench->add_option("--profile", profile, "desk|paper");
    bench->add_option("--seed", seed, "Random seed");
    bench->add_option("--cutoff", cutoff, "Per-run wall-clock cutoff in seconds (scalability)");
    bench->add_option("--suites", suites, "Override the number of suites (comparison)");
    bench->add_option("--systems", systems, "Restrict to these systems (comparison)");
    bench->add_option("--methods", methods, "Restrict to these methods (comparison)");
    bench->add_option("--out", out, "Output directory");

    auto* validate = app.add_subcommand("validate", "Containment rate of a stored model on a suite");
    std::string model_path, suite_path, vout;
    double eps = 1.0;
    validate->add_option("--model", model_path, "Model JSON written by identify")->required();
    validate->add_option("--suite", suite_path, "Suite JSON")->required();
    validate->add_option("--epsilon", eps, "Safety factor applied to the scaling factors");
    validate->add_option("--out", vout, "Optional output directory");

    auto* generate = app.add_subcommand("generate", "Write a synthetic test suite");
    int nm = 20, nk = 0, ns = 10;
    generate->add_option("--system", system, "Catalog system id")->required();
    generate->add_option("--cases", nm, "Number of test cases");
    generate->add_option("--steps", nk, "Steps per case (default n_p + 6)");
    generate->add_option("--samples", ns, "Samples per case");
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--out", out, "Output directory");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*identify)
            return cmd_identify(system, method, suite, constraints, seed, profile, out);
        if (*bench)
            return cmd_bench(which, profile, seed, cutoff, suites, systems, methods, out);
        if (*validate)
            return cmd_validate(model_path, suite_path, eps, vout);
        if (*generate)
            return cmd_generate(system, nm, nk, ns, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
