#include <doctest.h>

#include "fixtures.hpp"

#include <reachconf/graybox.hpp>
#include <reachconf/harness.hpp>

#include <cmath>

using namespace reachconf;

namespace {

// One case, one step, y = p u with u = 0; samples are plain output offsets.
TestSuite offsets_suite(const std::vector<double>& values)
{
    TestSuite suite;
    TestCase c;
    c.nominal_x0 = Vec::Zero(1);
    c.nominal_u = Mat::Zero(1, 1);
    for (double v : values)
        c.samples.push_back(Mat::Constant(1, 1, v));
    suite.cases.push_back(c);
    return suite;
}

TestSuite noise_free_suite(const StateSpaceModel& m, int nm, int nk, std::uint64_t seed)
{
    Rng rng(seed);
    TestSuite suite;
    for (int c = 0; c < nm; ++c) {
        TestCase tc;
        tc.nominal_x0 = Vec::Zero(m.nx);
        tc.nominal_u = Mat(m.nu, nk);
        for (Eigen::Index i = 0; i < tc.nominal_u.size(); ++i)
            tc.nominal_u.data()[i] = rng.uniform(-1.0, 1.0);
        tc.samples.push_back(simulate(m, tc.nominal_x0, tc.nominal_u));
        suite.cases.push_back(tc);
    }
    return suite;
}

} // namespace

TEST_CASE("underapproximated cost is the largest absolute deviation")
{
    const auto m = fixtures::static_gain(1.0);
    const auto suite = offsets_suite({-0.5, 0.3});
    const auto spec = fixtures::input_spec(1, 1);
    const auto gos = build_gos(m, suite, spec);
    CHECK(cost_under(gos, suite, spec, {}, false) == doctest::Approx(0.5));
    CHECK(cost_ls(gos, suite, spec, {}, false) == doctest::Approx(0.34));

    const auto swapped = offsets_suite({0.3, -0.5});
    CHECK(cost_ls(build_gos(m, swapped, spec), swapped, spec, {}, false) == doctest::Approx(0.34));

    const auto exact = offsets_suite({0.0, 0.0});
    CHECK(cost_under(build_gos(m, exact, spec), exact, spec, {}, false) == 0.0);
}

TEST_CASE("output shift enters the deviation for linear models")
{
    const auto m = fixtures::static_gain(1.0);
    const auto suite = offsets_suite({0.5, 0.5});
    auto spec = fixtures::input_spec(1, 1);
    spec.cdelta_u[0] = 0.5;
    const auto gos = build_gos(m, suite, spec);
    CHECK(cost_under(gos, suite, spec, {}, true) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cost_under(gos, suite, spec, {}, false) == doctest::Approx(0.5));
}

TEST_CASE("underapproximation never exceeds the conformance cost")
{
    Rng rng(21);
    const auto m = fixtures::scalar_linear(0.8);
    for (int trial = 0; trial < 10; ++trial) {
        auto truth = UncertaintySpec::identity(1, 1);
        truth.alpha_x[0] = rng.uniform(0.0, 0.3);
        truth.alpha_u[0] = rng.uniform(0.0, 0.3);
        TestSuite suite;
        for (int c = 0; c < 3; ++c) {
            Mat u(1, 4);
            for (int k = 0; k < 4; ++k)
                u(0, k) = rng.uniform(-1.0, 1.0);
            suite.cases.push_back(fixtures::sampled_case(m, truth, Vec::Zero(1), u, 5, rng));
        }
        const auto spec = UncertaintySpec::identity(1, 1);
        const auto r = identify_white(m, suite, spec);
        REQUIRE(r.conformant());
        const auto gos = build_gos(m, suite, r.spec);
        CHECK(cost_under(gos, suite, r.spec, {}, true) <= r.cost + 1e-8);
    }
}

TEST_CASE("sequential scheme recovers the scalar parameter from noise-free data")
{
    const auto truth_model = fixtures::scalar_linear(2.0);
    const auto suite = noise_free_suite(truth_model, 5, 5, 3);
    GrayboxConfig cfg;
    cfg.scheme = GrayScheme::Sequential;
    cfg.p0 = Vec::Constant(1, 0.01);
    cfg.max_evaluations = 400;
    cfg.seed = 4;
    const auto r = identify_gray(fixtures::scalar_linear(0.01), suite, UncertaintySpec::identity(1, 1), cfg);
    CHECK(r.p[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.white.conformant());
    CHECK(r.white.cost == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r.white.containment_rate == 1.0);
}

TEST_CASE("simultaneous scheme recovers a static gain")
{
    const auto suite = noise_free_suite(fixtures::static_gain(2.0), 4, 3, 5);
    GrayboxConfig cfg;
    cfg.scheme = GrayScheme::Simultaneous;
    cfg.p0 = Vec::Constant(1, 0.01);
    cfg.max_evaluations = 300;
    const auto r = identify_gray(fixtures::static_gain(0.01), suite, fixtures::input_spec(1, 1), cfg);
    CHECK(std::abs(r.p[0] - 2.0) <= 1e-3);
    CHECK(r.white.conformant());
}

TEST_CASE("gray-box runs are deterministic for a fixed seed")
{
    const auto sys = system_setup("pedestrian_ss");
    Rng rng(8);
    const auto truth = draw_true_spec(sys, rng);
    const auto suite = generate_suite(sys, truth, 5, 6, 4, 9);
    const auto spec = estimation_spec(truth, false, rng);
    GrayboxConfig cfg;
    cfg.max_evaluations = 150;
    cfg.seed = 17;
    const auto a = identify_gray(sys.model, suite, spec, cfg);
    const auto b = identify_gray(sys.model, suite, spec, cfg);
    CHECK(a.p == b.p);
    CHECK(a.white.cost == b.white.cost);
    CHECK(a.white.containment_rate == 1.0);
}

TEST_CASE("NARX input center is recovered from noise-free data")
{
    auto sys = system_setup("narx1");
    auto truth = UncertaintySpec::identity(0, 2);
    truth.c_x = Vec::Zero(0);
    truth.G_x = Mat::Zero(0, 0);
    truth.alpha_x = Vec::Zero(0);
    truth.cdelta_x = Vec::Zero(0);
    truth.c_u << 0.3, -0.2;
    truth.alpha_u.setZero();
    const auto suite = generate_suite(sys, truth, 8, 8, 1, 12);
    auto spec = truth;
    spec.c_u.setZero();
    spec.alpha_u.setOnes();
    GrayboxConfig cfg;
    cfg.scheme = GrayScheme::Sequential;
    cfg.estimate_input_center = true;
    cfg.p0 = params(sys.model) * 0.9;
    cfg.max_evaluations = 1500;
    cfg.seed = 2;
    const auto r = identify_gray(sys.model, suite, spec, cfg);
    CHECK(std::abs(r.c_u[0] - 0.3) < 0.1);
    CHECK(std::abs(r.c_u[1] + 0.2) < 0.1);
    CHECK(r.white.conformant());
}

TEST_CASE("parameter RMSE and result JSON")
{
    Vec a(2), b(2);
    a << 1.0, 2.0;
    b << 1.0, 4.0;
    CHECK(parameter_rmse(a, b) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(parameter_rmse(a, Vec::Zero(3)), std::invalid_argument);
    GrayboxResult r;
    r.p = a;
    r.rmse_p = 0.5;
    r.white.status = ConformanceStatus::Conformant;
    r.white.cost = 1.0;
    const auto j = gray_result_json(r);
    CHECK(j.find("\"p\"") != std::string::npos);
    CHECK(j.find("\"rmse_p\": 0.5") != std::string::npos);
}
