#pragma once

#include <reachconf/catalog.hpp>
#include <reachconf/models.hpp>
#include <reachconf/rng.hpp>

namespace fixtures {

using reachconf::Mat;
using reachconf::Vec;

// x_{k+1} = a x_k + p u_k, y_k = x_k + u_k with a fixed at 0.5.
inline reachconf::StateSpaceModel scalar_linear(double p = 1.0)
{
    reachconf::StateSpaceModel m;
    m.name = "scalar";
    m.nx = 1;
    m.nu = 1;
    m.ny = 1;
    m.p = Vec::Constant(1, p);
    m.param_names = {"p"};
    m.linear = true;
    m.f = [](const Vec& x, const Vec& u, const Vec& q) -> Vec { return 0.5 * x + q[0] * u; };
    m.g = [](const Vec& x, const Vec& u, const Vec&) -> Vec { return x + u; };
    return m;
}

// y_k = p u_k with a dummy state that stays at zero.
inline reachconf::StateSpaceModel static_gain(double p = 1.0)
{
    reachconf::StateSpaceModel m;
    m.name = "gain";
    m.nx = 1;
    m.nu = 1;
    m.ny = 1;
    m.p = Vec::Constant(1, p);
    m.param_names = {"p"};
    m.linear = true;
    m.f = [](const Vec& x, const Vec&, const Vec&) -> Vec { return 0.0 * x; };
    m.g = [](const Vec&, const Vec& u, const Vec& q) -> Vec { return q[0] * u; };
    return m;
}

// Input-only spec: no initial-state templates.
inline reachconf::UncertaintySpec input_spec(int nx, int nu)
{
    auto s = reachconf::UncertaintySpec::identity(nx, nu);
    s.G_x = Mat::Zero(nx, 0);
    s.alpha_x = Vec::Zero(0);
    return s;
}

// Samples drawn from the realized sets of `truth` by simulation.
inline reachconf::TestCase sampled_case(const reachconf::StateSpaceModel& m, const reachconf::UncertaintySpec& truth,
                                        const Vec& x0, const Mat& u, int ns, reachconf::Rng& rng)
{
    reachconf::TestCase c;
    c.nominal_x0 = x0;
    c.nominal_u = u;
    for (int s = 0; s < ns; ++s) {
        Vec lx(truth.eta_x());
        for (int j = 0; j < lx.size(); ++j)
            lx[j] = rng.uniform(-1.0, 1.0);
        Vec xs = x0 + truth.c_x + truth.cdelta_x + truth.G_x * truth.alpha_x.asDiagonal() * lx;
        Mat us = u;
        for (int k = 0; k < u.cols(); ++k) {
            Vec lu(truth.eta_u());
            for (int j = 0; j < lu.size(); ++j)
                lu[j] = rng.uniform(-1.0, 1.0);
            us.col(k) += truth.c_u + truth.cdelta_u + truth.G_u * truth.alpha_u.asDiagonal() * lu;
        }
        c.samples.push_back(reachconf::simulate(m, xs, us));
    }
    return c;
}

} // namespace fixtures
