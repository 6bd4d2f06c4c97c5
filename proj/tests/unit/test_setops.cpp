#include "doctest.h"
#include "oracles.hpp"

#include "reachconf/setops.hpp"

#include <random>

using namespace reachconf;

namespace {

Mat M(std::initializer_list<std::initializer_list<double>> rows)
{
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

Vec V(std::initializer_list<double> v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

} // namespace

TEST_CASE("minkowski sum concatenates generators")
{
    const Zonotope a(V({1, 0}), M({{1, 0}, {0, 1}}));
    const Zonotope b(V({0, 1}), M({{2}, {0}}));
    const auto s = minkowski_sum(a, b);
    CHECK(s.center() == V({1, 1}));
    CHECK(s.generators() == M({{1, 0, 2}, {0, 1, 0}}));
    const auto same = minkowski_sum(a, Zonotope::point(Vec::Zero(2)));
    CHECK(same.center() == a.center());
    CHECK(same.generators() == a.generators());
    CHECK_THROWS_AS(minkowski_sum(a, Zonotope(V({1}))), std::invalid_argument);
}

TEST_CASE("minkowski sum contains sums of member points")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Zonotope a(V({0.5, -1}), M({{1, 0.3, 0}, {0.2, 1, 0.5}}));
    const Zonotope b(V({0, 2}), M({{0.4, -0.1}, {0.1, 0.7}}));
    const auto s = minkowski_sum(a, b);
    for (int i = 0; i < 100; ++i) {
        const Vec la = Vec::NullaryExpr(3, [&]() { return U(rng); });
        const Vec lb = Vec::NullaryExpr(2, [&]() { return U(rng); });
        const Vec p = a.center() + a.generators() * la + b.center() + b.generators() * lb;
        CHECK(contains(s, p, 1e-9));
    }
}

TEST_CASE("cartesian product is block diagonal")
{
    const auto z = cartesian_product(Zonotope(V({1}), M({{2}})), Zonotope(V({3}), M({{4}})));
    CHECK(z.center() == V({1, 3}));
    CHECK(z.generators() == M({{2, 0}, {0, 4}}));
    const auto zp = cartesian_product(Zonotope(V({1}), M({{2, 5}})), Zonotope::point(V({7, 8})));
    CHECK(zp.dim() == 3);
    CHECK(zp.num_generators() == 2);
    CHECK(zp.generators().bottomRows(2).isZero());
}

TEST_CASE("linear map")
{
    const Zonotope sq(Vec::Zero(2), Mat::Identity(2, 2));
    const auto z = linear_map(2.0 * Mat::Identity(2, 2), sq);
    CHECK(z.generators() == 2.0 * Mat::Identity(2, 2));
    const auto zero = linear_map(Mat::Zero(2, 2), sq);
    CHECK(interval_norm(zero) == 0.0);
    CHECK_THROWS_AS(linear_map(Mat::Identity(3, 3), sq), std::invalid_argument);
}

TEST_CASE("linear map sends vertices to vertices")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat A = Mat::NullaryExpr(2, 2, [&]() { return U(rng); });
        const Zonotope z(V({U(rng), U(rng)}), Mat::NullaryExpr(2, 3, [&]() { return U(rng); }));
        const auto hull_mapped = oracle::convex_hull_2d(
            oracle::corner_points(A * z.center(), A * z.generators()));
        auto pre = oracle::convex_hull_2d(oracle::corner_points(z.center(), z.generators()));
        std::vector<Vec> mapped;
        for (const auto& v : pre)
            mapped.push_back(A * v);
        const auto hull_of_mapped = oracle::convex_hull_2d(mapped);
        REQUIRE(hull_mapped.size() == hull_of_mapped.size());
        for (const auto& v : hull_mapped) {
            double best = INFINITY;
            for (const auto& w : hull_of_mapped)
                best = std::min(best, (v - w).norm());
            CHECK(best <= 1e-9);
        }
    }
}

TEST_CASE("interval norm")
{
    CHECK(interval_norm(Zonotope(V({0, 0}), M({{1, -2}, {0, 3}}))) == 6.0);
    CHECK(interval_norm(Zonotope::point(V({1, 2}))) == 0.0);
    const Zonotope z(V({0, 0}), M({{1, -2}, {0.5, 3}}));
    CHECK(interval_norm(Zonotope(z.center(), 3.0 * z.generators())) == doctest::Approx(3.0 * interval_norm(z)));
}

TEST_CASE("halfspace form of the unit square")
{
    const auto hp = to_halfspace(Zonotope(Vec::Zero(2), Mat::Identity(2, 2)));
    CHECK(hp.num_facets() == 4);
    CHECK((hp.offsets.array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("halfspace form matches the vertex hull")
{
    const Zonotope z(Vec::Zero(2), M({{1, 1}, {0, 1}}));
    const auto hp = to_halfspace(z);
    CHECK(hp.num_facets() == 4);
    const auto hull = oracle::convex_hull_2d(oracle::corner_points(z.center(), z.generators()));
    CHECK(hull.size() == 4);
    // every hull vertex is tight on two facets
    for (const auto& v : hull) {
        const Vec slack = hp.offsets - hp.normals * v;
        CHECK(slack.minCoeff() >= -1e-12);
        CHECK((slack.array().abs() <= 1e-12).count() == 2);
    }
}

TEST_CASE("one dimensional halfspace form")
{
    const auto hp = to_halfspace(Zonotope(V({2}), M({{-0.5}})));
    REQUIRE(hp.num_facets() == 2);
    for (Eigen::Index i = 0; i < 2; ++i) {
        if (hp.normals(i, 0) > 0)
            CHECK(hp.offsets[i] == doctest::Approx(2.5));
        else
            CHECK(hp.offsets[i] == doctest::Approx(-1.5));
    }
}

TEST_CASE("rank deficient generators cannot be converted")
{
    CHECK_THROWS_AS(to_halfspace(Zonotope(Vec::Zero(2), M({{1, 2}, {1, 2}}))), DegenerateSetError);
    CHECK_THROWS_AS(to_halfspace(Zonotope::point(Vec::Zero(2))), DegenerateSetError);
}

TEST_CASE("facet count bound and parallel generators")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Mat G = Mat::NullaryExpr(3, 6, [&]() { return U(rng); });
    const auto hp = to_halfspace(Zonotope(Vec::Zero(3), G));
    CHECK(hp.num_facets() <= 2 * 15);
    Mat Gp(3, 7);
    Gp << G, -2.0 * G.col(0);
    const auto hp2 = to_halfspace(Zonotope(Vec::Zero(3), Gp));
    CHECK(hp2.num_facets() == hp.num_facets());
}

TEST_CASE("containment basics")
{
    const Zonotope sq(Vec::Zero(2), Mat::Identity(2, 2));
    CHECK(contains(sq, V({0.5, -0.5})));
    CHECK_FALSE(contains(sq, V({1.01, 0})));
    CHECK(contains(sq, V({1.0, 1.0})));
    CHECK(contains(Zonotope::point(V({1, 1})), V({1, 1})));
    CHECK_FALSE(contains(Zonotope(V({0, 0}), M({{1}, {1}})), V({0.5, 0.4})));
    CHECK(contains(Zonotope(V({0, 0}), M({{1}, {1}})), V({0.5, 0.5})));
}

TEST_CASE("membership agrees across representations on random instances")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int agreements = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int eta = 2 + rep % 4;
        const Zonotope z(V({U(rng), U(rng)}), Mat::NullaryExpr(2, eta, [&]() { return U(rng); }));
        const auto hp = to_halfspace(z);
        const auto hull = oracle::convex_hull_2d(oracle::corner_points(z.center(), z.generators()));
        for (int t = 0; t < 5; ++t) {
            const Vec p = z.center() + 2.0 * Vec::NullaryExpr(2, [&]() { return U(rng); });
            const bool by_hull = oracle::in_hull_2d(hull, p, 0.0);
            if (std::abs(oracle::in_hull_2d(hull, p, 1e-7) - oracle::in_hull_2d(hull, p, -1e-7)) > 0)
                continue; // too close to the boundary to call
            CHECK(hp.contains(p, 1e-9) == by_hull);
            CHECK(contains(z, p, 1e-9) == by_hull);
            ++agreements;
        }
    }
    CHECK(agreements >= 200);
}

TEST_CASE("gauge")
{
    const Zonotope sq(V({1, 1}), Mat::Identity(2, 2));
    CHECK(gauge(sq, V({3, 1})) == doctest::Approx(2.0));
    CHECK(gauge(sq, V({1, 1})) == doctest::Approx(0.0));
    CHECK(std::isinf(gauge(Zonotope(V({0, 0}), M({{1}, {1}})), V({1, 0}))));
}
