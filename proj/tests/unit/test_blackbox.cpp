#include <doctest.h>

#include <reachconf/blackbox.hpp>
#include <reachconf/harness.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace reachconf;

namespace {

struct NarxData {
    UncertaintySpec truth;
    TestSuite train, conf;
    UncertaintySpec spec;
};

NarxData narx_data(int cases, std::uint64_t seed)
{
    const auto sys = system_setup("narx1");
    Rng rng(seed);
    NarxData d;
    d.truth = draw_true_spec(sys, rng);
    d.train = generate_suite(sys, d.truth, cases, 8, 1, sub_seed(seed, 1));
    d.conf = generate_suite(sys, d.truth, 6, 8, 4, sub_seed(seed, 2));
    d.spec = d.truth;
    d.spec.alpha_u.setOnes();
    return d;
}

EvolutionConfig small_config(std::uint64_t seed)
{
    auto cfg = EvolutionConfig::desk(2);
    cfg.population = 20;
    cfg.generations = 4;
    cfg.cgp_population = 6;
    cfg.cgp_generations = 2;
    cfg.subsets = 2;
    cfg.seed = seed;
    return cfg;
}

double constant_predictor_sse(const gp::Dataset& d)
{
    const Eigen::RowVectorXd mean = d.target.colwise().mean();
    return (d.target.rowwise() - mean).squaredNorm();
}

} // namespace

TEST_CASE("best least-squares cost never worsens across generations")
{
    const auto d = narx_data(20, 3);
    const auto res = identify_black_gp(d.train, d.conf, d.spec, small_config(5));
    REQUIRE(res.best_cost_history.size() >= 2);
    for (std::size_t i = 1; i < res.best_cost_history.size(); ++i)
        CHECK(res.best_cost_history[i] <= res.best_cost_history[i - 1]);
}

TEST_CASE("least-squares GP beats the constant predictor")
{
    const auto d = narx_data(20, 4);
    auto cfg = small_config(8);
    cfg.population = 40;
    cfg.generations = 8;
    const auto res = identify_black_gp(d.train, d.conf, d.spec, cfg);
    const auto data = gp::make_dataset(d.train, 2, d.spec.c_u);
    CHECK(res.ls_cost < constant_predictor_sse(data));
    CHECK(std::isfinite(res.ls_cost));
}

TEST_CASE("black-box identification is deterministic for a seed")
{
    const auto d = narx_data(12, 6);
    const auto cfg = small_config(11);
    const auto a = identify_black_cgp(d.train, d.train, d.conf, d.spec, cfg);
    const auto b = identify_black_cgp(d.train, d.train, d.conf, d.spec, cfg);
    CHECK(a.model_text == b.model_text);
    CHECK(a.best_cost_history == b.best_cost_history);
    CHECK(a.white.cost == b.white.cost);
}

TEST_CASE("replication only copies tournament winners")
{
    auto cfg = small_config(1);
    cfg.p_crossover = 0.0;
    cfg.p_mutation = 0.0;
    cfg.p_replication = 1.0;
    Rng rng(2);
    auto pop = initial_population(10, 1, 1, cfg, rng);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].cost = static_cast<double>(i);
        pop[i].weights = {Vec::Ones(static_cast<Eigen::Index>(pop[i].genes[0].size()) + 1)};
    }
    const auto texts = [&](const Population& p) {
        std::vector<std::string> out;
        for (const auto& ind : p)
            out.push_back(gp::to_sexpr(ind, 2, 1, 1));
        return out;
    };
    const auto before = texts(pop);
    const auto next = evolve(pop, 1, 1, cfg, rng);
    CHECK(next.size() == pop.size());
    CHECK(gp::to_sexpr(next[0], 2, 1, 1) == before[0]);
    for (const auto& t : texts(next))
        CHECK(std::find(before.begin(), before.end(), t) != before.end());
}

TEST_CASE("tournament selection prefers lower cost then fewer nodes")
{
    auto cfg = small_config(1);
    Rng rng(3);
    auto pop = initial_population(6, 1, 1, cfg, rng);
    for (auto& ind : pop)
        ind.cost = 5.0;
    pop[3].cost = 1.0;
    CHECK(best_index(pop) == 3);
    Rng pick(4);
    const auto& w = tournament_select(pop, 200, pick);
    CHECK(w.cost == 1.0);
}

TEST_CASE("divergent candidates receive the penalty")
{
    const auto d = narx_data(8, 7);
    auto cfg = small_config(1);
    auto p = gp::parse_sexpr("(narx (np 2) (ny 2) (nu 2) (output 2 (gene 1000 (mul (y 1 1) (y 1 1))))"
                             " (output 2 (gene 1000 (mul (y 2 1) (y 2 1)))))");
    p.ind.cost = 1.0;
    const auto subsets = split_suite(d.train, 2);
    CHECK(conformance_score(p.ind, subsets, d.spec, cfg, 2, 2) == 2.0 * cfg.infeasible_penalty);

    p.ind.cost = std::numeric_limits<double>::infinity();
    CHECK(conformance_score(p.ind, subsets, d.spec, cfg, 2, 2) == 2.0 * cfg.infeasible_penalty);
}

TEST_CASE("the true NARX structure scores below the penalty")
{
    const auto d = narx_data(8, 9);
    auto cfg = small_config(1);
    auto p = gp::parse_sexpr("(narx (np 2) (ny 2) (nu 2)"
                             " (output 0 (gene 1 (pdiv (y 1 1) (add 1 (mul (y 2 1) (y 2 1))))) (gene 0.8 (u 1 1)))"
                             " (output 0 (gene 1 (pdiv (mul (y 1 1) (y 2 1)) (add 1 (mul (y 2 1) (y 2 1)))))"
                             " (gene 1.2 (u 2 2))))");
    p.ind.cost = 0.0;
    const double s = conformance_score(p.ind, split_suite(d.train, 2), d.spec, cfg, 2, 2);
    CHECK(s < cfg.infeasible_penalty);
}

TEST_CASE("suites split into nearly equal contiguous parts")
{
    TestSuite s;
    for (int i = 0; i < 10; ++i) {
        TestCase c;
        c.nominal_u = Mat::Constant(1, 2, i);
        c.samples.push_back(Mat::Zero(1, 2));
        s.cases.push_back(c);
    }
    const auto parts = split_suite(s, 3);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].num_cases() == 3);
    CHECK(parts[1].num_cases() == 3);
    CHECK(parts[2].num_cases() == 4);
    CHECK(parts[2].cases.back().nominal_u(0, 0) == 9.0);
    CHECK_THROWS_AS(split_suite(s, 11), std::invalid_argument);
    CHECK_THROWS_AS(split_suite(s, 0), std::invalid_argument);
}

TEST_CASE("evolution settings are validated")
{
    auto cfg = EvolutionConfig::desk(2);
    cfg.p_crossover = 0.9;
    cfg.p_mutation = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = EvolutionConfig::desk(2);
    cfg.cgp_population = cfg.population + 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(EvolutionConfig::paper(3).validate());
}
