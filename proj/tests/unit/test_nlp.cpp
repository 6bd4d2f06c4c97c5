#include <doctest.h>

#include <reachconf/nlp.hpp>

#include <cmath>

using namespace reachconf;
using optim::NlpProblem;
using optim::solve_nlp;

TEST_CASE("quadratic in one dimension")
{
    NlpProblem p;
    p.objective = [](const Vec& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
    p.x0 = Vec::Zero(1);
    const auto r = solve_nlp(p, 1);
    CHECK(std::abs(r.x[0] - 2.0) < 1e-4);
    CHECK(r.value < 1e-8);
}

TEST_CASE("rosenbrock")
{
    NlpProblem p;
    p.objective = [](const Vec& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    p.x0 = Vec::Zero(2);
    p.x0 << -1.2, 1.0;
    p.max_evaluations = 5000;
    p.initial_step = 0.5;
    const auto r = solve_nlp(p, 7);
    CHECK(r.value < 1e-6);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-2);
}

TEST_CASE("bounds are respected")
{
    NlpProblem p;
    p.objective = [](const Vec& x) { return (x[0] + 5.0) * (x[0] + 5.0) + x[1] * x[1]; };
    p.x0 = Vec::Ones(2);
    p.lower = Vec::Zero(2);
    p.upper = Vec::Constant(2, 3.0);
    const auto r = solve_nlp(p, 3);
    CHECK(r.x[0] >= 0.0);
    CHECK(r.x[0] < 1e-4);
}

TEST_CASE("non-finite values are avoided and never worse than start")
{
    NlpProblem p;
    p.objective = [](const Vec& x) {
        if (x[0] < 0.5)
            return std::nan("");
        return std::abs(x[0] - 0.6);
    };
    p.x0 = Vec::Constant(1, 1.0);
    const auto r = solve_nlp(p, 11);
    CHECK(std::isfinite(r.value));
    CHECK(r.value <= 0.4);
}

TEST_CASE("same seed gives identical results")
{
    NlpProblem p;
    p.objective = [](const Vec& x) { return std::sin(3.0 * x[0]) + x[0] * x[0] + std::cos(x[1]) * x[1]; };
    p.x0 = Vec::Zero(2);
    const auto a = solve_nlp(p, 42);
    const auto b = solve_nlp(p, 42);
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("evaluation budget is honoured")
{
    NlpProblem p;
    int count = 0;
    p.objective = [&](const Vec& x) {
        ++count;
        return x.squaredNorm();
    };
    p.x0 = Vec::Ones(4);
    p.max_evaluations = 50;
    const auto r = solve_nlp(p, 5);
    CHECK(count <= 50);
    CHECK(r.evaluations == count);
}

TEST_CASE("expired deadline stops the search")
{
    NlpProblem p;
    p.objective = [](const Vec& x) { return x.squaredNorm(); };
    p.x0 = Vec::Ones(2);
    p.deadline = Deadline::after(-1.0);
    const auto r = solve_nlp(p, 1);
    CHECK(r.evaluations <= 4);
    CHECK(r.value <= 2.0);
}
