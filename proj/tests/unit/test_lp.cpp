#include "doctest.h"
#include "oracles.hpp"

#include "reachconf/lp.hpp"

#include <random>

using namespace reachconf;
using namespace reachconf::optim;

namespace {

LinearProgram dense_lp(const Mat& A, const Vec& b, const Vec& c)
{
    LpBuilder bld;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        bld.add_var(c[j]);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        std::vector<std::pair<int, double>> row;
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            row.emplace_back(static_cast<int>(j), A(i, j));
        bld.add_le(row, b[i]);
    }
    return bld.build();
}

} // namespace

TEST_CASE("min x subject to x >= 3")
{
    LpBuilder b;
    const int x = b.add_var(1.0, -kInf, kInf);
    b.add_ge({{x, 1.0}}, 3.0);
    const auto r = solve_lp(b.build());
    REQUIRE(r.optimal());
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.objective == doctest::Approx(3.0));
}

TEST_CASE("contradictory bounds are infeasible")
{
    LpBuilder b;
    const int x = b.add_var(0.0);
    b.add_le({{x, 1.0}}, -1.0);
    CHECK(solve_lp(b.build()).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded objective is reported")
{
    LpBuilder b;
    const int x = b.add_var(-1.0);
    const int y = b.add_var(0.0);
    b.add_le({{x, 1.0}, {y, -1.0}}, 1.0);
    CHECK(solve_lp(b.build()).status == LpStatus::Unbounded);
}

TEST_CASE("equality constrained free variables")
{
    // min |x - 2| + |y + 1| written with split variables, x + y = 0.5
    LpBuilder b;
    const int x = b.add_var(0.0, -kInf, kInf);
    const int y = b.add_var(0.0, -kInf, kInf);
    const int tx = b.add_var(1.0);
    const int ty = b.add_var(1.0);
    b.add_le({{x, 1.0}, {tx, -1.0}}, 2.0);
    b.add_le({{x, -1.0}, {tx, -1.0}}, -2.0);
    b.add_le({{y, 1.0}, {ty, -1.0}}, -1.0);
    b.add_le({{y, -1.0}, {ty, -1.0}}, 1.0);
    b.add_eq({{x, 1.0}, {y, 1.0}}, 0.5);
    const auto r = solve_lp(b.build());
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.x[0] + r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("random dense LPs agree with vertex enumeration")
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int shapes[][2] = {{3, 4}, {4, 6}, {5, 5}, {6, 6}, {3, 30}, {2, 25}};
    int count = 0;
    for (int rep = 0; rep < 4; ++rep) {
        for (const auto& sh : shapes) {
            const int m = sh[0];
            const int n = sh[1];
            Mat A(m, n);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    A(i, j) = 0.5 + 0.5 * U(rng) + (i == 0 ? 0.2 : -0.3 * std::abs(U(rng)));
            Vec b(m);
            for (int i = 0; i < m; ++i)
                b[i] = 1.0 + 2.0 * std::abs(U(rng));
            Vec c(n);
            for (int j = 0; j < n; ++j)
                c[j] = U(rng);
            const double ref = oracle::lp_vertex_enumeration(A, b, c);
            for (auto alg : {LpAlgorithm::Auto, LpAlgorithm::Primal}) {
                LpOptions opt;
                opt.algorithm = alg;
                const auto r = solve_lp(dense_lp(A, b, c), opt);
                REQUIRE(r.optimal());
                CHECK(std::abs(r.objective - ref) <= 1e-7);
                CHECK(((A * r.x - b).array() <= 1e-8).all());
                CHECK((r.x.array() >= -1e-8).all());
            }
            ++count;
        }
    }
    CHECK(count >= 20);
}

TEST_CASE("Bland-only pricing reaches the same optimum")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        Mat A = Mat::NullaryExpr(5, 7, [&]() { return U(rng); });
        Vec b = Vec::Constant(5, 1.0);
        Vec c = Vec::NullaryExpr(7, [&]() { return -U(rng); });
        LpOptions opt;
        opt.bland_only = true;
        const auto r1 = solve_lp(dense_lp(A, b, c), opt);
        const auto r2 = solve_lp(dense_lp(A, b, c));
        REQUIRE(r1.optimal());
        REQUIRE(r2.optimal());
        CHECK(r1.objective == doctest::Approx(r2.objective).epsilon(1e-9));
        CHECK(r1.bland_iterations == r1.iterations);
    }
}

TEST_CASE("degenerate LP with many redundant constraints")
{
    // Box [0,1]^3 described redundantly; max sum x.
    LpBuilder b;
    for (int j = 0; j < 3; ++j)
        b.add_var(-1.0);
    for (int rep = 0; rep < 20; ++rep) {
        for (int j = 0; j < 3; ++j)
            b.add_le({{j, 1.0}}, 1.0);
        b.add_le({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 3.0);
    }
    const auto r = solve_lp(b.build());
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(-3.0));
}

TEST_CASE("large sparse LP exercises the sparse kernel path")
{
    // min sum t_i s.t. |x_i - x_{i+1} - d_i| <= t_i, x_0 = 0; optimum 0.
    const int n = 800;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    LpBuilder b;
    std::vector<int> x(n), t(n - 1);
    for (int i = 0; i < n; ++i)
        x[i] = b.add_var(0.0, -kInf, kInf);
    for (int i = 0; i + 1 < n; ++i)
        t[i] = b.add_var(1.0);
    b.add_eq({{x[0], 1.0}}, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double d = U(rng);
        b.add_le({{x[i], 1.0}, {x[i + 1], -1.0}, {t[i], -1.0}}, d);
        b.add_le({{x[i], -1.0}, {x[i + 1], 1.0}, {t[i], -1.0}}, -d);
    }
    const auto r = solve_lp(b.build());
    REQUIRE(r.optimal());
    CHECK(std::abs(r.objective) <= 1e-8);
}

TEST_CASE("dimension mismatches are rejected")
{
    LinearProgram lp;
    lp.objective = Vec::Ones(2);
    lp.lower = Vec::Zero(1);
    lp.upper = Vec::Constant(2, kInf);
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}
