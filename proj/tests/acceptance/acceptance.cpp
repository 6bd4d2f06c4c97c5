// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include "fixtures.hpp"
#include "oracles.hpp"

#include <reachconf/blackbox.hpp>
#include <reachconf/catalog.hpp>
#include <reachconf/experiments.hpp>
#include <reachconf/graybox.hpp>
#include <reachconf/harness.hpp>
#include <reachconf/io.hpp>
#include <reachconf/setops.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

using namespace reachconf;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

StateSpaceModel random_linear_model(Rng& rng, int nx, int nu, int ny)
{
    Mat A(nx, nx), B(nx, nu), C(ny, nx), D(ny, nu);
    for (Mat* M : {&A, &B, &C, &D})
        for (Eigen::Index i = 0; i < M->size(); ++i)
            M->data()[i] = rng.uniform(-1.0, 1.0);
    A *= 0.5;
    StateSpaceModel m;
    m.name = "random";
    m.nx = nx;
    m.nu = nu;
    m.ny = ny;
    m.linear = true;
    m.f = [A, B](const Vec& x, const Vec& u, const Vec&) -> Vec { return A * x + B * u; };
    m.g = [C, D](const Vec& x, const Vec& u, const Vec&) -> Vec { return C * x + D * u; };
    return m;
}

TestSuite random_suite(const StateSpaceModel& m, Rng& rng, int nk, int nm, int ns)
{
    auto truth = UncertaintySpec::identity(m.nx, m.nu);
    for (int j = 0; j < m.nx; ++j)
        truth.alpha_x[j] = rng.uniform(0.0, 0.3);
    for (int j = 0; j < m.nu; ++j) {
        truth.alpha_u[j] = rng.uniform(0.0, 0.3);
        truth.c_u[j] = rng.uniform(-0.2, 0.2);
    }
    TestSuite suite;
    for (int c = 0; c < nm; ++c) {
        Vec x0(m.nx);
        Mat u(m.nu, nk);
        for (Eigen::Index i = 0; i < x0.size(); ++i)
            x0[i] = rng.uniform(-1.0, 1.0);
        for (Eigen::Index i = 0; i < u.size(); ++i)
            u.data()[i] = rng.uniform(-1.0, 1.0);
        suite.cases.push_back(fixtures::sampled_case(m, truth, x0, u, ns, rng));
    }
    return suite;
}

Verdict soundness()
{
    int runs = 0, conformant = 0, violations = 0;
    double worst = 1.0;
    for (const char* id : {"pedestrian_ss", "pedestrian_arx", "lorenz", "narx1", "water_tanks3", "vehicle"}) {
        const auto sys = system_setup(id);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Rng rng(seed);
            const auto truth = draw_true_spec(sys, rng);
            const int nk = model_order(sys.model) + 5;
            const auto suite = generate_suite(sys, truth, 8, nk, 5, sub_seed(seed, 1));
            Rng est(sub_seed(seed, 2));
            const auto spec = estimation_spec(truth, !is_narx(sys.model) && !std::get<StateSpaceModel>(sys.model).linear,
                                              est);
            for (auto mode : {ConstraintMode::Auto, ConstraintMode::Generator}) {
                ConformanceConfig cfg;
                cfg.mode = mode;
                const auto r = identify_white(sys.model, suite, spec, cfg);
                ++runs;
                if (!r.conformant())
                    continue;
                ++conformant;
                const auto gos = build_gos(sys.model, suite, r.spec);
                const double rate = containment_rate(gos, suite, r.spec, 1e-7);
                worst = std::min(worst, rate);
                if (rate < 1.0)
                    ++violations;
            }
        }
    }
    return {conformant > 0 && violations == 0,
            std::to_string(conformant) + "/" + std::to_string(runs) + " conformant runs, minimum containment " +
                fmt("%.6f", worst)};
}

Verdict exact_recovery()
{
    bool ok = true;
    double max_cost = 0.0, max_alpha = 0.0;
    for (const char* id : {"pedestrian_ss", "pedestrian_arx", "lorenz"}) {
        const auto sys = system_setup(id);
        Rng rng(3);
        auto truth = draw_true_spec(sys, rng);
        truth.alpha_x.setZero();
        truth.alpha_u.setZero();
        const auto suite = generate_suite(sys, truth, 5, model_order(sys.model) + 5, 3, 4);
        auto spec = truth;
        spec.alpha_x.setOnes();
        spec.alpha_u.setOnes();
        const auto r = identify_white(sys.model, suite, spec);
        ok = ok && r.conformant();
        max_cost = std::max(max_cost, std::abs(r.cost));
        max_alpha = std::max(max_alpha, r.alpha.cwiseAbs().maxCoeff());
    }
    ok = ok && max_cost <= 1e-8 && max_alpha <= 1e-8;

    TestSuite suite;
    Rng rng(5);
    const auto truth_model = fixtures::scalar_linear(2.0);
    for (int c = 0; c < 5; ++c) {
        Mat u(1, 5);
        for (Eigen::Index k = 0; k < u.size(); ++k)
            u(0, k) = rng.uniform(-1.0, 1.0);
        TestCase tc;
        tc.nominal_x0 = Vec::Constant(1, rng.uniform(-1.0, 1.0));
        tc.nominal_u = u;
        for (int s = 0; s < 3; ++s)
            tc.samples.push_back(simulate(truth_model, tc.nominal_x0, u));
        suite.cases.push_back(tc);
    }
    GrayboxConfig cfg;
    cfg.scheme = GrayScheme::Sequential;
    cfg.p0 = Vec::Constant(1, 0.01);
    cfg.max_evaluations = 400;
    cfg.seed = 4;
    const auto g = identify_gray(fixtures::scalar_linear(0.01), suite, UncertaintySpec::identity(1, 1), cfg);
    const double err = std::abs(g.p[0] - 2.0);
    ok = ok && err <= 1e-3;
    return {ok, "white max |cost| " + fmt("%.2e", max_cost) + ", max |alpha| " + fmt("%.2e", max_alpha) +
                    "; GraySeq |p - 2| " + fmt("%.2e", err)};
}

struct Comparison {
    std::vector<MetricsRow> rows;
    double seconds = 0.0;
};

Comparison run_comparison(const std::vector<std::string>& systems, const std::vector<Method>& methods, int suites,
                          std::uint64_t seed)
{
    ComparisonConfig cfg;
    cfg.systems = systems;
    cfg.methods = methods;
    cfg.profile = Profile::desk();
    cfg.profile.suites = suites;
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    Comparison c;
    c.rows = comparison_experiment(cfg);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

std::vector<MetricsRow> select(const std::vector<MetricsRow>& rows, const std::string& system,
                               const std::string& method)
{
    std::vector<MetricsRow> out;
    for (const auto& r : rows)
        if ((system.empty() || r.system == system) && r.method == method)
            out.push_back(r);
    return out;
}

const SummaryRow* find(const std::vector<SummaryRow>& s, const std::string& method)
{
    for (const auto& r : s)
        if (r.method == method)
            return &r;
    return nullptr;
}

Verdict white_table(const Comparison& c)
{
    bool ok = true;
    std::string detail;
    for (const char* sys : {"pedestrian_ss", "pedestrian_arx"}) {
        const auto s = summarize(c.rows, sys);
        const auto* w = find(s, "white");
        if (!w)
            return {false, std::string("no White rows for ") + sys};
        ok = ok && w->runs >= 10 && w->failure_rate == 0.0 && w->mean_normalized_cost >= 0.95 &&
             w->mean_normalized_cost <= 1.05;
        detail += std::string(sys) + ": mean " + fmt("%.4f", w->mean_normalized_cost) + ", failures " +
                  fmt("%.0f%%", w->failure_rate) + "; ";
    }
    return {ok, detail + "reference 1.00"};
}

Verdict whiteadd_degradation(const Comparison& c)
{
    const auto white = select(c.rows, "pedestrian_arx", "white");
    const auto add = select(c.rows, "pedestrian_arx", "whiteadd");
    int worse = 0, total = 0;
    for (const auto& a : add)
        for (const auto& w : white)
            if (a.suite == w.suite) {
                ++total;
                if (a.normalized_cost > w.normalized_cost)
                    ++worse;
            }
    const bool ok = total >= 10 && worse >= 0.8 * total;
    return {ok, "WhiteAdd above White on " + std::to_string(worse) + "/" + std::to_string(total) + " suites"};
}

Verdict gray_ordering(const Comparison& c)
{
    std::vector<MetricsRow> ped;
    for (const auto& r : c.rows)
        if (r.system == "pedestrian_ss" || r.system == "pedestrian_arx")
            ped.push_back(r);
    const auto s = summarize(ped);
    const auto* seq = find(s, "grayseq");
    const auto* seq2 = find(s, "grayseq2");
    const auto* sim = find(s, "graysim");
    if (!seq || !seq2 || !sim)
        return {false, "missing gray-box rows"};
    const bool ok = seq->runs >= 20 && seq->median_ranked <= seq2->median_ranked &&
                    sim->failure_rate >= seq->failure_rate;
    return {ok, "median GraySeq " + fmt("%.4g", seq->median_ranked) + " vs GraySeq2 " +
                    fmt("%.4g", seq2->median_ranked) + "; failures GraySim " + fmt("%.0f%%", sim->failure_rate) +
                    " vs GraySeq " + fmt("%.0f%%", seq->failure_rate) + " (" + std::to_string(seq->runs) + " suites)"};
}

Verdict blackbox_ordering(const Comparison& c)
{
    const auto narx = summarize(c.rows, "narx1");
    const auto lorenz = summarize(c.rows, "lorenz");
    const auto* ngp = find(narx, "blackgp");
    const auto* ncgp = find(narx, "blackcgp");
    const auto* lgp = find(lorenz, "blackgp");
    const auto* lcgp = find(lorenz, "blackcgp");
    if (!ngp || !ncgp || !lgp || !lcgp)
        return {false, "missing black-box rows"};
    const bool ok = ngp->runs >= 10 && lgp->runs >= 10 && ncgp->failure_rate <= ngp->failure_rate &&
                    lcgp->median_ranked < lgp->median_ranked;
    return {ok, "NARX1 failures CGP " + fmt("%.0f%%", ncgp->failure_rate) + " vs GP " +
                    fmt("%.0f%%", ngp->failure_rate) + "; Lorenz median CGP " + fmt("%.4g", lcgp->median_ranked) +
                    " vs GP " + fmt("%.4g", lgp->median_ranked) + " (failures ranked last; CGP " +
                    fmt("%.0f%%", lcgp->failure_rate) + ", GP " + fmt("%.0f%%", lgp->failure_rate) + ")"};
}

Verdict mode_equivalence()
{
    Rng rng(2024);
    int compared = 0, attempts = 0;
    double worst = 0.0;
    bool ok = true;
    while (compared < 40 && attempts < 200) {
        ++attempts;
        const int ny = 1 + rng.below(3);
        const int nx = ny + rng.below(2);
        const int nu = 1 + rng.below(2);
        const auto m = random_linear_model(rng, nx, nu, ny);
        const auto suite = random_suite(m, rng, 1 + rng.below(5), 1 + rng.below(3), 2 + rng.below(4));
        const auto spec = UncertaintySpec::identity(nx, nu);
        ConformanceConfig h, g;
        h.mode = ConstraintMode::Halfspace;
        g.mode = ConstraintMode::Generator;
        ConformanceResult rh;
        try {
            rh = identify_white(m, suite, spec, h);
        } catch (const DegenerateSetError&) {
            continue;
        }
        const auto rg = identify_white(m, suite, spec, g);
        if (!rh.conformant() || !rg.conformant()) {
            ok = false;
            continue;
        }
        const double diff = std::abs(rh.cost - rg.cost) / std::max(1.0, std::abs(rg.cost));
        worst = std::max(worst, diff);
        ++compared;
    }
    ok = ok && compared >= 30 && worst <= 1e-6;
    return {ok, std::to_string(compared) + " instances, max relative cost gap " + fmt("%.2e", worst)};
}

Verdict under_bound()
{
    Rng rng(77);
    int n = 0;
    double worst = -INFINITY;
    bool ok = true;
    while (n < 60) {
        const int ny = 1 + rng.below(3);
        const int nx = 1 + rng.below(3);
        const int nu = 1 + rng.below(3);
        const auto m = random_linear_model(rng, nx, nu, ny);
        const auto suite = random_suite(m, rng, 1 + rng.below(5), 1 + rng.below(3), 2 + rng.below(5));
        ConformanceConfig cfg;
        cfg.mode = ConstraintMode::Generator;
        const auto r = identify_white(m, suite, UncertaintySpec::identity(nx, nu), cfg);
        if (!r.conformant()) {
            ok = false;
            break;
        }
        const auto gos = build_gos(m, suite, r.spec);
        const double lu = cost_under(gos, suite, r.spec, cfg, true);
        worst = std::max(worst, lu - r.cost);
        ok = ok && lu <= r.cost + 1e-8;
        ++n;
    }
    return {ok, std::to_string(n) + " instances, max (l_U - cost) " + fmt("%.2e", worst)};
}

Verdict scalability(double cutoff)
{
    const auto rows = scalability_experiment(ScalabilityConfig::table(cutoff));
    const auto at = [&](int nk, int nm, int ns, int ny) -> const ScalabilityRow* {
        for (const auto& r : rows)
            if (r.point.nk == nk && r.point.nm == nm && r.point.ns == ns && r.point.ny == ny)
                return &r;
        return nullptr;
    };
    const auto t = [&](const std::optional<double>& v) { return v ? fmt("%.4g s", *v) : std::string(">cutoff"); };
    const auto* a = at(20, 10, 1, 3);
    const auto* s1 = at(4, 10, 1, 3);
    const auto* s10 = at(4, 10, 10, 3);
    const auto* s100 = at(4, 10, 100, 3);
    const auto* y9 = at(4, 10, 1, 9);
    if (!a || !s1 || !s10 || !s100 || !y9)
        return {false, "table points missing"};

    const bool pa = !a->halfspace_seconds || (a->generator_seconds && *a->halfspace_seconds > *a->generator_seconds);
    bool pb = s1->halfspace_seconds && s10->halfspace_seconds && s100->halfspace_seconds;
    if (pb) {
        const double base = *s1->halfspace_seconds;
        for (const auto* r : {s10, s100})
            pb = pb && std::abs(*r->halfspace_seconds / base - 1.0) <= 0.2;
    }
    const bool gen_up = s1->generator_seconds && s10->generator_seconds &&
                        (!s100->generator_seconds || *s100->generator_seconds > *s10->generator_seconds) &&
                        *s10->generator_seconds > *s1->generator_seconds;
    pb = pb && gen_up;
    const bool pc = !y9->halfspace_seconds;

    std::string detail = std::string("(a) ") + (pa ? "pass" : "fail") + " n_k=20 halfspace " + t(a->halfspace_seconds) +
                         " vs generator " + t(a->generator_seconds) + "; (b) " + (pb ? "pass" : "fail") +
                         " halfspace n_s=1/10/100 " + t(s1->halfspace_seconds) + " / " + t(s10->halfspace_seconds) +
                         " / " + t(s100->halfspace_seconds) + ", generator " + t(s1->generator_seconds) + " / " +
                         t(s10->generator_seconds) + " / " + t(s100->generator_seconds) + "; (c) " +
                         (pc ? "pass" : "fail") + " halfspace n_y=9 " + t(y9->halfspace_seconds);
    return {pa && pb && pc, detail};
}

Verdict zonotope_laws()
{
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const auto rand_mat = [&](Eigen::Index r, Eigen::Index c) { return Mat::NullaryExpr(r, c, [&]() { return U(gen); }); };
    bool ok = true;
    double norm_gap = 0.0, map_gap = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + rep % 4;
        const Zonotope a(rand_mat(n, 1), rand_mat(n, 1 + rep % 5));
        const Zonotope b(rand_mat(n, 1), rand_mat(n, 2 + rep % 3));
        norm_gap = std::max(norm_gap, std::abs(interval_norm(minkowski_sum(a, b)) - interval_norm(a) - interval_norm(b)));
        const Mat A = rand_mat(1 + rep % 3, n);
        const auto lhs = linear_map(A, minkowski_sum(a, b));
        const auto rhs = minkowski_sum(linear_map(A, a), linear_map(A, b));
        map_gap = std::max(map_gap, (lhs.center() - rhs.center()).cwiseAbs().maxCoeff());
        map_gap = std::max(map_gap, (lhs.generators() - rhs.generators()).cwiseAbs().maxCoeff());
    }
    ok = norm_gap <= 1e-12 && map_gap <= 1e-12;

    int agree = 0, disagree = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int eta = 2 + rep % 5;
        const Zonotope z(rand_mat(2, 1), rand_mat(2, eta));
        const auto hp = to_halfspace(z);
        const auto hull = oracle::convex_hull_2d(oracle::corner_points(z.center(), z.generators()));
        for (int t = 0; t < 10; ++t) {
            const Vec p = z.center() + 2.0 * rand_mat(2, 1);
            if (oracle::in_hull_2d(hull, p, 1e-7) != oracle::in_hull_2d(hull, p, -1e-7))
                continue;
            const bool truth = oracle::in_hull_2d(hull, p, 0.0);
            if (hp.contains(p, 1e-9) == truth && contains(z, p, 1e-9) == truth)
                ++agree;
            else
                ++disagree;
        }
    }
    ok = ok && disagree == 0 && agree >= 200;
    return {ok, "norm additivity gap " + fmt("%.1e", norm_gap) + ", map distributivity gap " + fmt("%.1e", map_gap) +
                    ", membership " + std::to_string(agree) + " agreements / " + std::to_string(disagree) +
                    " disagreements on 50 instances"};
}

Verdict safety_factor()
{
    const auto rep = vehicle_experiment(VehicleConfig{});
    bool ok = rep.identified.conformant() && rep.containment.size() == 4;
    std::string detail;
    double prev = -1.0;
    for (const auto& [eps, rate] : rep.containment) {
        ok = ok && rate >= prev;
        prev = rate;
        detail += "eps " + fmt("%.1f", eps) + ": " + fmt("%.4f", rate) + "; ";
    }
    return {ok, detail + "training conformant " + (rep.identified.conformant() ? "yes" : "no")};
}

int run_cli(const std::string& cli, const std::string& args)
{
    const std::string cmd = "REACHCONF_THREADS=1 \"" + cli + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Verdict determinism(const std::string& cli)
{
    if (cli.empty() || !fs::exists(cli))
        return {false, "CLI binary not found: " + cli};
    const auto root = fs::temp_directory_path() / ("reachconf_accept_" + std::to_string(::getpid()));
    fs::create_directories(root);
    struct Job {
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Job> jobs = {
        {"identify --system pedestrian_ss --method white --suite generate --seed 5", {"result.json", "suite.json"}},
        {"identify --system pedestrian_arx --method grayseq --suite generate --seed 6", {"result.json"}},
        {"identify --system narx1 --method blackcgp --suite generate --seed 7", {"result.json"}},
        {"identify --system lorenz --method graysim --suite generate --seed 8", {"result.json"}},
        {"generate --system lorenz --cases 4 --samples 3 --seed 9", {"suite.json", "truth.json"}},
    };
    int identical = 0, compared = 0;
    std::string bad;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        std::string outs[2];
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / ("job" + std::to_string(j) + "_" + std::to_string(run));
            run_cli(cli, jobs[j].args + " --out \"" + dir.string() + "\"");
            outs[run] = dir.string();
        }
        for (const auto& f : jobs[j].files) {
            ++compared;
            std::string a, b;
            try {
                a = io::read_file(outs[0] + "/" + f);
                b = io::read_file(outs[1] + "/" + f);
            } catch (const std::exception&) {
                bad += " missing " + f + " (job " + std::to_string(j) + ")";
                continue;
            }
            if (a == b && !a.empty())
                ++identical;
            else
                bad += " " + f + " differs (job " + std::to_string(j) + ")";
        }
    }
    fs::remove_all(root);
    return {identical == compared, std::to_string(identical) + "/" + std::to_string(compared) +
                                       " output files byte-identical across runs" + bad};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance suite"};
    std::string cli;
    std::vector<int> only;
    bool strict = false;
    double cutoff = 60.0;
    std::string report;
    app.add_option("--cli", cli, "Path to the reachconf command-line tool");
    app.add_option("--only", only, "Run only these criteria");
    app.add_flag("--strict", strict, "Exit with the number of failed criteria");
    app.add_option("--cutoff", cutoff, "Scalability cutoff in seconds");
    app.add_option("--report", report, "Also write the criterion lines to this file");
    CLI11_PARSE(app, argc, argv);

    const std::set<int> wanted(only.begin(), only.end());
    const auto want = [&](int i) { return wanted.empty() || wanted.count(i) > 0; };

    std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria;
    std::optional<Comparison> pedestrian, blackbox;
    const auto ped = [&]() -> const Comparison& {
        if (!pedestrian)
            pedestrian = run_comparison({"pedestrian_ss", "pedestrian_arx"},
                                        {Method::White, Method::WhiteAdd, Method::GraySeq, Method::GraySeq2,
                                         Method::GraySim},
                                        10, 1);
        return *pedestrian;
    };
    const auto bb = [&]() -> const Comparison& {
        if (!blackbox)
            blackbox = run_comparison({"narx1", "lorenz"}, {Method::BlackGP, Method::BlackCGP}, 10, 1);
        return *blackbox;
    };

    criteria[1] = {"soundness of conformant white-box sets", soundness};
    criteria[2] = {"exact recovery from noise-free data", exact_recovery};
    criteria[3] = {"White normalized cost on the pedestrian systems", [&] { return white_table(ped()); }};
    criteria[4] = {"halfspace and generator modes agree", mode_equivalence};
    criteria[5] = {"underapproximated cost bounds the optimum", under_bound};
    criteria[6] = {"water-tank scalability trends", [&] { return scalability(cutoff); }};
    criteria[7] = {"WhiteAdd degrades on pedestrian ARX", [&] { return whiteadd_degradation(ped()); }};
    criteria[8] = {"gray-box ordering", [&] { return gray_ordering(ped()); }};
    criteria[9] = {"black-box ordering", [&] { return blackbox_ordering(bb()); }};
    criteria[10] = {"zonotope laws", zonotope_laws};
    criteria[11] = {"safety-factor monotonicity on the vehicle data", safety_factor};
    criteria[12] = {"CLI determinism", [&] { return determinism(cli); }};

    int failed = 0, ran = 0;
    std::string lines;
    for (auto& [id, c] : criteria) {
        if (!want(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++ran;
        if (!v.pass)
            ++failed;
        char head[128];
        std::snprintf(head, sizeof head, "criterion %2d %s  ", id, v.pass ? "PASS" : "FAIL");
        const std::string line = head + c.first + ": " + v.detail + " [" + fmt("%.1f", secs) + " s]\n";
        std::fputs(line.c_str(), stdout);
        std::fflush(stdout);
        lines += line;
    }
    lines += std::to_string(ran - failed) + "/" + std::to_string(ran) + " criteria passed\n";
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    if (!report.empty())
        io::write_file(report, lines.substr(0, lines.size() - 1));
    return strict ? failed : 0;
}
