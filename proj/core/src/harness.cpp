#include "reachconf/harness.hpp"

#include "reachconf/catalog.hpp"

#include <cmath>
#include <limits>

namespace reachconf {

SystemSetup system_setup(const std::string& id)
{
    SystemSetup s;
    s.id = id;
    s.model = catalog_model(id);
    if (id.rfind("water_tanks", 0) == 0) {
        s.range = {2.0, 4.0, 0.0, 1.0};
        s.center_range = 0.0;
        s.generator_range = 0.1;
        const int n = num_inputs(s.model);
        s.active_inputs.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            s.active_inputs[static_cast<std::size_t>(i)] = i % 3 == 0;
    }
    return s;
}

namespace {

Vec uniform_vec(Eigen::Index n, double lo, double hi, Rng& rng)
{
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = rng.uniform(lo, hi);
    return v;
}

} // namespace

UncertaintySpec draw_true_spec(const SystemSetup& sys, Rng& rng)
{
    const int nu = num_inputs(sys.model);
    const int nx = is_narx(sys.model) ? 0 : std::get<StateSpaceModel>(sys.model).nx;
    UncertaintySpec t;
    const double c = sys.center_range;
    const double g = sys.generator_range;
    t.c_x = uniform_vec(nx, -c, c, rng);
    t.G_x = uniform_vec(nx, -g, g, rng).asDiagonal();
    t.c_u = uniform_vec(nu, -c, c, rng);
    t.G_u = uniform_vec(nu, -g, g, rng).asDiagonal();
    t.alpha_x = Vec::Ones(nx);
    t.alpha_u = Vec::Ones(nu);
    t.cdelta_x = Vec::Zero(nx);
    t.cdelta_u = Vec::Zero(nu);
    for (int i = 0; i < nu; ++i) {
        if (!sys.input_active(i)) {
            t.c_u[i] = 0.0;
            t.G_u(i, i) = 0.0;
        }
    }
    return t;
}

Vec sample_zonotope(const Vec& c, const Mat& G, const Vec& alpha, Rng& rng, double vertex_fraction)
{
    Vec lam;
    if (vertex_fraction > 0.0 && rng.bernoulli(vertex_fraction)) {
        lam.resize(G.cols());
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            lam[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    } else {
        lam = uniform_vec(G.cols(), -1.0, 1.0, rng);
    }
    return c + G * alpha.cwiseProduct(lam);
}

TestCase sample_case(const StateSpaceModel& m, const UncertaintySpec& truth, const Vec& x0, const Mat& u, int ns,
                     Rng& rng, double vertex_fraction)
{
    TestCase c;
    c.nominal_x0 = x0;
    c.nominal_u = u;
    const Vec cx = truth.c_x + truth.cdelta_x;
    const Vec cu = truth.c_u + truth.cdelta_u;
    for (int s = 0; s < ns; ++s) {
        const Vec xs = sample_zonotope(x0 + cx, truth.G_x, truth.alpha_x, rng, vertex_fraction);
        Mat us = u;
        for (Eigen::Index k = 0; k < u.cols(); ++k)
            us.col(k) = sample_zonotope(u.col(k) + cu, truth.G_u, truth.alpha_u, rng, vertex_fraction);
        c.samples.push_back(simulate(m, xs, us));
    }
    return c;
}

TestSuite generate_suite(const SystemSetup& sys, const UncertaintySpec& truth, int nm, int nk, int ns,
                         std::uint64_t seed)
{
    if (nm < 1 || nk < 1 || ns < 1)
        throw std::invalid_argument("generate_suite: n_m, n_k and n_s must be positive");
    truth.validate();
    const int nu = num_inputs(sys.model);
    const int ny = num_outputs(sys.model);
    const int np = model_order(sys.model);
    if (nk <= np)
        throw std::invalid_argument("generate_suite: need more steps than the model order");
    const Vec cu = truth.c_u + truth.cdelta_u;
    TestSuite suite;
    for (int m = 0; m < nm; ++m) {
        TestCase c;
        bool ok = false;
        for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
            Rng rng(sub_seed(sub_seed(seed, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(attempt)));
            c = TestCase{};
            const auto& r = sys.range;
            Mat u(nu, nk);
            for (Eigen::Index i = 0; i < u.size(); ++i)
                u.data()[i] = rng.uniform(r.u_lo, r.u_hi);
            for (int i = 0; i < nu; ++i)
                if (!sys.input_active(i))
                    u.row(i).setZero();
            c.nominal_u = u;
            try {
                if (const auto* ss = std::get_if<StateSpaceModel>(&sys.model)) {
                    const Vec x0 = uniform_vec(ss->nx, r.x_lo, r.x_hi, rng);
                    c = sample_case(*ss, truth, x0, u, ns, rng, sys.vertex_fraction);
                } else {
                    const auto& narx = std::get<NarxModel>(sys.model);
                    Mat init(ny, np);
                    for (Eigen::Index i = 0; i < init.size(); ++i)
                        init.data()[i] = rng.uniform(r.x_lo, r.x_hi);
                    for (int s = 0; s < ns; ++s) {
                        Mat us = u;
                        for (int k = 0; k < nk; ++k)
                            us.col(k) = sample_zonotope(u.col(k) + cu, truth.G_u, truth.alpha_u, rng, sys.vertex_fraction);
                        c.samples.push_back(simulate(narx, init, us));
                    }
                }
                ok = true;
            } catch (const SimulationDivergedError&) {
            }
        }
        if (!ok)
            throw SimulationDivergedError("generate_suite: simulation kept diverging");
        suite.cases.push_back(std::move(c));
    }
    return suite;
}

UncertaintySpec estimation_spec(const UncertaintySpec& truth, bool centers_known, Rng& rng)
{
    UncertaintySpec s = truth;
    s.alpha_x = Vec::Ones(truth.eta_x());
    s.alpha_u = Vec::Ones(truth.eta_u());
    s.cdelta_x.setZero();
    s.cdelta_u.setZero();
    if (!centers_known) {
        for (Eigen::Index i = 0; i < s.c_x.size(); ++i)
            s.c_x[i] = rng.normal(0.0, 0.01);
        for (Eigen::Index i = 0; i < s.c_u.size(); ++i)
            s.c_u[i] = rng.normal(0.0, 0.01);
    }
    return s;
}

double true_cost(const Model& model, const UncertaintySpec& truth, const TestSuite& suite,
                 const ConformanceConfig& cfg)
{
    const auto gos = build_gos(model, suite, truth);
    return cost_vector(gos, truth, cfg).dot(truth.alpha());
}

double normalized_cost(const ConformanceResult& r, double true_cost_value)
{
    if (!(true_cost_value > 0.0))
        throw std::invalid_argument("normalized_cost: true cost must be positive");
    if (!r.conformant() || !std::isfinite(r.cost))
        return std::numeric_limits<double>::infinity();
    return r.cost / true_cost_value;
}

bool is_failure(const ConformanceResult& r, double normalized)
{
    return !r.conformant() || !(normalized <= 100.0);
}

ConformanceResult scale_uncertainty(const ConformanceResult& r, double eps)
{
    if (!(eps >= 1.0))
        throw std::invalid_argument("scale_uncertainty: eps must be at least 1");
    ConformanceResult out = r;
    out.alpha *= eps;
    out.cost *= eps;
    out.spec.set_alpha(out.alpha);
    return out;
}

} // namespace reachconf
