#include "reachconf/catalog.hpp"
#include "reachconf/conform.hpp"
#include "reachconf/harness.hpp"
#include "reachconf/lp.hpp"
#include "reachconf/setops.hpp"

#include <benchmark/benchmark.h>

using namespace reachconf;

namespace {

struct TankData {
    SystemSetup sys;
    UncertaintySpec spec;
    TestSuite suite;
};

TankData tank_data(int ny, int nk, int nm, int ns)
{
    TankData d{system_setup("water_tanks" + std::to_string(ny)), {}, {}};
    Rng rng(7);
    const auto truth = draw_true_spec(d.sys, rng);
    d.suite = generate_suite(d.sys, truth, nm, nk, ns, 11);
    d.spec = estimation_spec(truth, true, rng);
    return d;
}

void BM_FacetNormals(benchmark::State& state)
{
    const auto n = static_cast<int>(state.range(0));
    Rng rng(3);
    Mat G(n, 4 * n);
    for (Eigen::Index i = 0; i < G.size(); ++i)
        G.data()[i] = rng.uniform(-1.0, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(facet_normals(G));
}
BENCHMARK(BM_FacetNormals)->Arg(2)->Arg(3)->Arg(4);

void BM_ZonotopeContains(benchmark::State& state)
{
    Rng rng(5);
    Mat G(3, 12);
    for (Eigen::Index i = 0; i < G.size(); ++i)
        G.data()[i] = rng.uniform(-1.0, 1.0);
    const Zonotope z(Vec::Zero(3), G);
    const Vec p = Vec::Constant(3, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(contains(z, p));
}
BENCHMARK(BM_ZonotopeContains);

void BM_WhiteTanks(benchmark::State& state)
{
    const auto mode = state.range(0) == 0 ? ConstraintMode::Halfspace : ConstraintMode::Generator;
    const auto d = tank_data(3, static_cast<int>(state.range(1)), 10, 1);
    ConformanceConfig cfg;
    cfg.mode = mode;
    cfg.verify = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(identify_white(d.sys.model, d.suite, d.spec, cfg));
}
BENCHMARK(BM_WhiteTanks)->Args({0, 4})->Args({1, 4})->Args({0, 10})->Args({1, 10})->Unit(benchmark::kMillisecond);

void BM_WhitePedestrian(benchmark::State& state)
{
    const auto sys = system_setup("pedestrian_ss");
    Rng rng(9);
    const auto truth = draw_true_spec(sys, rng);
    const auto suite = generate_suite(sys, truth, 20, 6, 10, 13);
    const auto spec = estimation_spec(truth, false, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(identify_white(sys.model, suite, spec));
}
BENCHMARK(BM_WhitePedestrian)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
