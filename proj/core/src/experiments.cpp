#include "reachconf/experiments.hpp"

#include "reachconf/catalog.hpp"
#include "reachconf/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace reachconf {

const char* to_string(Method m)
{
    switch (m) {
    case Method::White: return "white";
    case Method::WhiteAdd: return "whiteadd";
    case Method::GraySeq: return "grayseq";
    case Method::GraySeq2: return "grayseq2";
    case Method::GraySim: return "graysim";
    case Method::BlackGP: return "blackgp";
    case Method::BlackCGP: return "blackcgp";
    }
    return "white";
}

Method method_from_string(const std::string& s)
{
    for (auto m : {Method::White, Method::WhiteAdd, Method::GraySeq, Method::GraySeq2, Method::GraySim,
                   Method::BlackGP, Method::BlackCGP})
        if (s == to_string(m))
            return m;
    throw std::invalid_argument("unknown method: " + s);
}

bool is_blackbox(Method m) { return m == Method::BlackGP || m == Method::BlackCGP; }

Profile Profile::desk() { return Profile{}; }

Profile Profile::paper()
{
    Profile p;
    p.name = "paper";
    p.suites = 100;
    p.validation_samples = 50;
    p.gray_evaluations = 6000;
    p.train1_cases = 1500;
    p.train2_cases = 100;
    p.subsets = 10;
    p.gp_population = 300;
    p.gp_generations = 95;
    p.cgp_population = 100;
    p.cgp_generations = 5;
    return p;
}

Profile Profile::from_name(const std::string& name)
{
    if (name == "desk")
        return desk();
    if (name == "paper")
        return paper();
    throw std::invalid_argument("unknown profile: " + name);
}

EvolutionConfig Profile::evolution(int np, std::uint64_t seed) const
{
    auto c = EvolutionConfig::desk(np);
    c.population = gp_population;
    c.generations = gp_generations;
    c.cgp_population = cgp_population;
    c.cgp_generations = cgp_generations;
    c.subsets = subsets;
    c.seed = seed;
    return c;
}

int blackbox_order(const std::string& system)
{
    if (system == "lorenz")
        return 3;
    if (system == "narx1")
        return 2;
    return 0;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t text_hash(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Black-box models see only measured outputs and inputs.
void drop_states(TestSuite& suite)
{
    for (auto& c : suite.cases)
        c.nominal_x0.resize(0);
}

} // namespace

ProblemInstance make_instance(const std::string& system, const Profile& profile, std::uint64_t seed)
{
    ProblemInstance inst;
    inst.system = system_setup(system);
    inst.seed = seed;
    Rng rng(sub_seed(seed, 0));
    inst.truth = draw_true_spec(inst.system, rng);
    const int order = model_order(inst.system.model);
    const int nk = order + profile.extra_steps;
    inst.conformance = generate_suite(inst.system, inst.truth, profile.nm, nk, profile.ns, sub_seed(seed, 1));
    inst.validation = generate_suite(inst.system, inst.truth, profile.validation_cases, nk,
                                     profile.validation_samples, sub_seed(seed, 2));
    inst.estimate = estimation_spec(inst.truth, !is_linear(inst.system.model), rng);
    inst.true_cost = true_cost(inst.system.model, inst.truth, inst.conformance);

    inst.np = blackbox_order(system);
    if (inst.has_blackbox()) {
        const int bnk = inst.np + profile.extra_steps;
        inst.bb_estimate.c_x = Vec::Zero(0);
        inst.bb_estimate.G_x = Mat::Zero(0, 0);
        inst.bb_estimate.alpha_x = Vec::Zero(0);
        inst.bb_estimate.cdelta_x = Vec::Zero(0);
        inst.bb_estimate.c_u = Vec::Zero(inst.truth.c_u.size());
        inst.bb_estimate.G_u = inst.truth.G_u;
        inst.bb_estimate.alpha_u = Vec::Ones(inst.truth.eta_u());
        inst.bb_estimate.cdelta_u = Vec::Zero(inst.truth.c_u.size());
        if (bnk == nk) {
            inst.bb_conformance = inst.conformance;
            inst.bb_validation = inst.validation;
        } else {
            inst.bb_conformance = generate_suite(inst.system, inst.truth, profile.nm, bnk, profile.ns, sub_seed(seed, 3));
            inst.bb_validation = generate_suite(inst.system, inst.truth, profile.validation_cases, bnk,
                                                profile.validation_samples, sub_seed(seed, 4));
        }
        inst.train1 = generate_suite(inst.system, inst.truth, profile.train1_cases, bnk, profile.ns, sub_seed(seed, 5));
        inst.train2 = generate_suite(inst.system, inst.truth, profile.train2_cases, bnk, profile.ns, sub_seed(seed, 6));
        ConformanceConfig late;
        late.weights.assign(static_cast<std::size_t>(inst.np), 0.0);
        inst.bb_true_cost = true_cost(inst.system.model, inst.truth, inst.bb_conformance, late);
        for (auto* s : {&inst.train1, &inst.train2, &inst.bb_conformance, &inst.bb_validation})
            drop_states(*s);
    }
    return inst;
}

MethodOutcome run_method(Method method, const ProblemInstance& inst, const Profile& profile,
                         const ConformanceConfig& conform)
{
    MethodOutcome out;
    out.method = method;
    const auto& model = inst.system.model;
    const auto t0 = std::chrono::steady_clock::now();
    Model used = model;
    const TestSuite* validation = &inst.validation;
    double reference = inst.true_cost;
    switch (method) {
    case Method::White:
        out.result = identify_white(model, inst.conformance, inst.estimate, conform);
        break;
    case Method::WhiteAdd:
        out.result = identify_white_additive(model, inst.conformance, inst.estimate, conform);
        break;
    case Method::GraySeq:
    case Method::GraySeq2:
    case Method::GraySim: {
        GrayboxConfig g;
        g.scheme = method == Method::GraySeq ? GrayScheme::Sequential
                   : method == Method::GraySeq2 ? GrayScheme::SequentialLS
                                                : GrayScheme::Simultaneous;
        g.max_evaluations = profile.gray_evaluations;
        g.seed = sub_seed(inst.seed, 100);
        g.conform = conform;
        UncertaintySpec spec = inst.estimate;
        if (inst.system.id == "narx1") {
            g.estimate_input_center = true;
            Rng rng(sub_seed(inst.seed, 101));
            for (Eigen::Index i = 0; i < spec.c_u.size(); ++i)
                spec.c_u[i] = rng.normal(0.0, 0.01);
        }
        auto r = identify_gray(model, inst.conformance, spec, g);
        out.p = r.p;
        out.rmse_p = parameter_rmse(r.p, params(model));
        out.result = r.white;
        used = with_params(model, r.p);
        break;
    }
    case Method::BlackGP:
    case Method::BlackCGP: {
        if (!inst.has_blackbox())
            throw std::invalid_argument("run_method: no black-box setup for " + inst.system.id);
        auto e = profile.evolution(inst.np, sub_seed(inst.seed, 200));
        e.conform = conform;
        const auto r = method == Method::BlackGP
                           ? identify_black_gp(inst.train1, inst.bb_conformance, inst.bb_estimate, e)
                           : identify_black_cgp(inst.train1, inst.train2, inst.bb_conformance, inst.bb_estimate, e);
        out.result = r.white;
        out.model_text = r.model_text;
        used = gp::to_narx(r.individual, inst.np, num_outputs(model), num_inputs(model));
        validation = &inst.bb_validation;
        reference = inst.bb_true_cost;
        break;
    }
    }
    out.seconds = seconds_since(t0);
    out.normalized_cost = normalized_cost(out.result, reference);
    out.failed = is_failure(out.result, out.normalized_cost);
    if (out.result.conformant()) {
        try {
            out.validation_containment = validation_containment(used, out.result, *validation);
        } catch (const SimulationDivergedError&) {
            out.validation_containment = 0.0;
        }
    }
    return out;
}

std::string outcome_json(const MethodOutcome& o)
{
    auto j = nlohmann::ordered_json::parse(result_json(o.result));
    j["method"] = to_string(o.method);
    j["normalized_cost"] = std::isfinite(o.normalized_cost) ? nlohmann::ordered_json(o.normalized_cost)
                                                            : nlohmann::ordered_json(nullptr);
    j["failed"] = o.failed;
    if (o.p)
        j["p"] = std::vector<double>(o.p->data(), o.p->data() + o.p->size());
    if (o.p || o.rmse_p)
        j["rmse_p"] = o.rmse_p ? nlohmann::ordered_json(*o.rmse_p) : nlohmann::ordered_json(nullptr);
    if (!o.model_text.empty())
        j["model"] = o.model_text;
    j["validation_containment"] = o.validation_containment;
    return j.dump(2);
}

std::vector<MetricsRow> comparison_experiment(const ComparisonConfig& cfg)
{
    struct Unit {
        std::string system;
        int suite;
    };
    std::vector<Unit> units;
    for (const auto& s : cfg.systems)
        for (int i = 0; i < cfg.profile.suites; ++i)
            units.push_back({s, i});
    std::vector<std::vector<MetricsRow>> rows(units.size());
    parallel_for(units.size(), [&](std::size_t u) {
        const auto& unit = units[u];
        const auto seed = sub_seed(sub_seed(cfg.seed, text_hash(unit.system)), static_cast<std::uint64_t>(unit.suite));
        const auto inst = make_instance(unit.system, cfg.profile, seed);
        for (auto m : cfg.methods) {
            if (is_blackbox(m) && !inst.has_blackbox())
                continue;
            MetricsRow row;
            row.system = unit.system;
            row.method = to_string(m);
            row.suite = unit.suite;
            try {
                const auto o = run_method(m, inst, cfg.profile);
                row.normalized_cost = o.normalized_cost;
                row.failed = o.failed;
                row.seconds = o.seconds;
                row.rmse_p = o.rmse_p;
                row.validation_containment = o.validation_containment;
            } catch (const std::exception&) {
                row.normalized_cost = std::numeric_limits<double>::infinity();
                row.failed = true;
            }
            rows[u].push_back(row);
        }
    });
    std::vector<MetricsRow> all;
    for (auto& r : rows)
        all.insert(all.end(), r.begin(), r.end());
    return all;
}

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows, const std::string& system)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const MetricsRow*>> groups;
    for (const auto& r : rows) {
        if (!system.empty() && r.system != system)
            continue;
        if (!groups.count(r.method))
            order.push_back(r.method);
        groups[r.method].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& m : order) {
        SummaryRow s;
        s.method = m;
        std::vector<double> costs, ranked, rmse;
        double time = 0.0;
        int failures = 0;
        for (const auto* r : groups[m]) {
            ++s.runs;
            time += r->seconds;
            if (r->failed)
                ++failures;
            else
                costs.push_back(r->normalized_cost);
            ranked.push_back(r->failed ? std::numeric_limits<double>::infinity() : r->normalized_cost);
            if (r->rmse_p)
                rmse.push_back(*r->rmse_p);
        }
        s.failure_rate = 100.0 * failures / std::max(1, s.runs);
        s.mean_seconds = time / std::max(1, s.runs);
        double sum = 0.0;
        for (double c : costs)
            sum += c;
        s.mean_normalized_cost = costs.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / costs.size();
        s.median_normalized_cost = median(costs);
        s.median_ranked = median(ranked);
        if (!rmse.empty()) {
            double t = 0.0;
            for (double v : rmse)
                t += v;
            s.mean_rmse_p = t / rmse.size();
        }
        out.push_back(s);
    }
    return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows)
{
    std::ostringstream os;
    os << "system,method,suite,normalized_cost,failed,seconds,rmse_p,validation_containment\n";
    for (const auto& r : rows)
        os << r.system << ',' << r.method << ',' << r.suite << ',' << fmt(r.normalized_cost) << ','
           << (r.failed ? 1 : 0) << ',' << fmt(r.seconds) << ',' << (r.rmse_p ? fmt(*r.rmse_p) : "") << ','
           << fmt(r.validation_containment) << '\n';
    return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream os;
    os << "method,runs,mean_normalized_cost,median_normalized_cost,median_ranked,failure_rate_percent,mean_seconds,mean_rmse_p\n";
    for (const auto& s : rows)
        os << s.method << ',' << s.runs << ',' << fmt(s.mean_normalized_cost) << ','
           << fmt(s.median_normalized_cost) << ',' << fmt(s.median_ranked) << ',' << fmt(s.failure_rate) << ',' << fmt(s.mean_seconds) << ','
           << (s.mean_rmse_p ? fmt(*s.mean_rmse_p) : "") << '\n';
    return os.str();
}

std::string boxplot_csv(const std::vector<MetricsRow>& rows)
{
    std::ostringstream os;
    os << "system,method,suite,normalized_cost\n";
    for (const auto& r : rows)
        if (!r.failed)
            os << r.system << ',' << r.method << ',' << r.suite << ',' << fmt(r.normalized_cost) << '\n';
    return os.str();
}

ScalabilityConfig ScalabilityConfig::table(double cutoff)
{
    ScalabilityConfig c;
    c.cutoff_seconds = cutoff;
    c.points = {{4, 10, 1, 3},  {20, 10, 1, 3}, {40, 10, 1, 3}, {4, 100, 1, 3}, {4, 1000, 1, 3},
                {4, 10, 10, 3}, {4, 10, 100, 3}, {4, 10, 1, 6}, {4, 10, 1, 9},  {4, 10, 1, 100}};
    return c;
}

std::vector<ScalabilityRow> scalability_experiment(const ScalabilityConfig& cfg)
{
    std::vector<ScalabilityRow> out;
    for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        const auto& pt = cfg.points[i];
        const auto sys = system_setup("water_tanks" + std::to_string(pt.ny));
        // Points sharing n_y share the truth and case seeds, so suites that
        // differ only in n_m or n_s are nested.
        const auto key = static_cast<std::uint64_t>(pt.ny);
        Rng rng(sub_seed(cfg.seed, key));
        const auto truth = draw_true_spec(sys, rng);
        const auto suite = generate_suite(sys, truth, pt.nm, pt.nk, pt.ns, sub_seed(cfg.seed, 1000 + key));
        auto spec = UncertaintySpec::identity(static_cast<int>(truth.c_x.size()), static_cast<int>(truth.c_u.size()));
        spec.c_x = truth.c_x;
        spec.c_u = truth.c_u;
        ScalabilityRow row;
        row.point = pt;
        for (auto mode : {ConstraintMode::Halfspace, ConstraintMode::Generator}) {
            std::vector<double> times;
            bool timed_out = false;
            double total = 0.0;
            for (int r = 0; !timed_out && r < 50 && (r < std::max(1, cfg.repeats) || total < cfg.min_total_seconds);
                 ++r) {
                ConformanceConfig cc;
                cc.mode = mode;
                cc.verify = false;
                cc.deadline = Deadline::after(cfg.cutoff_seconds);
                cc.lp.deadline = cc.deadline;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    identify_white(sys.model, suite, spec, cc);
                    times.push_back(seconds_since(t0));
                    total += times.back();
                } catch (const TimeoutError&) {
                    timed_out = true;
                }
                if (!times.empty() && times.back() > 0.2 * cfg.cutoff_seconds)
                    break;
            }
            std::optional<double> t;
            if (!timed_out)
                t = median(times);
            (mode == ConstraintMode::Halfspace ? row.halfspace_seconds : row.generator_seconds) = t;
        }
        out.push_back(row);
    }
    return out;
}

std::string scalability_csv(const std::vector<ScalabilityRow>& rows)
{
    std::ostringstream os;
    os << "n_k,n_m,n_s,n_y,halfspace_seconds,generator_seconds\n";
    for (const auto& r : rows)
        os << r.point.nk << ',' << r.point.nm << ',' << r.point.ns << ',' << r.point.ny << ','
           << (r.halfspace_seconds ? fmt(*r.halfspace_seconds) : ">cutoff") << ','
           << (r.generator_seconds ? fmt(*r.generator_seconds) : ">cutoff") << '\n';
    return os.str();
}

UncertaintySpec vehicle_truth()
{
    UncertaintySpec t;
    Vec gx(5), gu(11);
    gx << 0.0, 0.55, 0.0, 0.66, 0.0;
    gu << 0.0, 0.0, 0.03, 0.02, 0.0, 0.06, 0.0, 2.82, 1.84, 0.05, 0.79;
    t.c_x = Vec::Zero(5);
    t.G_x = gx.asDiagonal();
    t.alpha_x = Vec::Ones(5);
    t.cdelta_x = Vec::Zero(5);
    t.c_u = Vec::Zero(11);
    t.G_u = gu.asDiagonal();
    t.alpha_u = Vec::Ones(11);
    t.cdelta_u = Vec::Zero(11);
    return t;
}

namespace {

TestSuite vehicle_suite(const StateSpaceModel& m, const UncertaintySpec& truth, int nm, int nk, int ns,
                        std::uint64_t seed)
{
    TestSuite suite;
    for (int c = 0; c < nm; ++c) {
        Rng rng(sub_seed(seed, static_cast<std::uint64_t>(c)));
        Vec x0(5);
        x0 << 0.0, 0.0, rng.uniform(-0.05, 0.05), rng.uniform(5.0, 15.0), rng.uniform(-M_PI, M_PI);
        Mat u = Mat::Zero(m.nu, nk);
        for (int k = 0; k < nk; ++k) {
            u(0, k) = rng.uniform(-0.5, 0.5);
            u(1, k) = rng.uniform(-1.0, 1.0);
        }
        suite.cases.push_back(sample_case(m, truth, x0, u, ns, rng, 0.5));
    }
    return suite;
}

} // namespace

VehicleReport vehicle_experiment(const VehicleConfig& cfg)
{
    const auto m = kinematic_vehicle();
    VehicleReport rep;
    rep.truth = vehicle_truth();
    const auto train = vehicle_suite(m, rep.truth, cfg.train_cases, cfg.train_steps, cfg.train_samples,
                                     sub_seed(cfg.seed, 1));
    const auto valid = vehicle_suite(m, rep.truth, cfg.validation_cases, cfg.validation_steps, 1,
                                     sub_seed(cfg.seed, 2));
    const auto spec = UncertaintySpec::identity(m.nx, m.nu);
    rep.identified = identify_white(m, train, spec);
    for (double eps : cfg.epsilons) {
        const auto scaled = scale_uncertainty(rep.identified, eps);
        rep.containment.emplace_back(eps, validation_containment(m, scaled, valid));
    }
    return rep;
}

} // namespace reachconf
