#include "reachconf/graybox.hpp"

#include "reachconf/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace reachconf {

const char* to_string(GrayScheme s)
{
    switch (s) {
    case GrayScheme::Simultaneous: return "simultaneous";
    case GrayScheme::Sequential: return "sequential";
    case GrayScheme::SequentialLS: return "sequential-ls";
    }
    return "sequential";
}

namespace {

template <class Accumulate>
double deviation_cost(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
                      const ConformanceConfig& cfg, bool use_shift, Accumulate acc)
{
    const Vec cdelta = spec.cdelta();
    double total = 0.0;
    for (std::size_t m = 0; m < gos.size(); ++m) {
        const auto& go = gos[m];
        const auto& c = suite.cases[m];
        for (int k = go.first_valid; k < go.nk; ++k) {
            const double w = cfg.weight(k);
            if (w == 0.0)
                continue;
            Vec yd = Vec::Zero(go.ny);
            if (use_shift)
                yd = deviation_set_matrices(go, spec, k).center_map * cdelta;
            total += w * acc(go, c, k, yd);
        }
    }
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

} // namespace

double cost_under(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
                  const ConformanceConfig& cfg, bool use_shift)
{
    return deviation_cost(gos, suite, spec, cfg, use_shift, [](const GOModel& go, const TestCase& c, int k, const Vec& yd) {
        Vec worst = Vec::Zero(go.ny);
        for (int s = 0; s < c.num_samples(); ++s)
            worst = worst.cwiseMax((measurement_deviation(go, c, s, k) - yd).cwiseAbs());
        return worst.sum();
    });
}

double cost_ls(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
               const ConformanceConfig& cfg, bool use_shift)
{
    return deviation_cost(gos, suite, spec, cfg, use_shift, [](const GOModel& go, const TestCase& c, int k, const Vec& yd) {
        double sum = 0.0;
        for (int s = 0; s < c.num_samples(); ++s)
            sum += (measurement_deviation(go, c, s, k) - yd).squaredNorm();
        return sum;
    });
}

double parameter_rmse(const Vec& estimate, const Vec& truth)
{
    if (estimate.size() != truth.size() || truth.size() == 0)
        throw std::invalid_argument("parameter_rmse: size mismatch");
    return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(truth.size()));
}

GrayboxResult identify_gray(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                            const GrayboxConfig& cfg)
{
    if (cfg.max_evaluations <= 0)
        throw std::invalid_argument("identify_gray: evaluation budget must be positive");
    if (suite.cases.empty())
        throw std::invalid_argument("identify_gray: empty suite");
    spec.validate();

    const bool linear = is_linear(model);
    const auto np = params(model).size();
    Rng rng(sub_seed(cfg.seed, 0));
    Vec p0 = cfg.p0;
    if (p0.size() == 0) {
        p0.resize(np);
        for (Eigen::Index i = 0; i < np; ++i)
            p0[i] = rng.normal(0.0, 0.01);
    }
    if (p0.size() != np)
        throw std::invalid_argument("identify_gray: initial guess has wrong length");
    const Vec pscale = (1.0 + p0.array().abs()).matrix();

    const auto nu = spec.c_u.size();
    const auto nshift = spec.c_x.size() + nu;
    const bool with_shift = linear && cfg.scheme != GrayScheme::Simultaneous;
    const Eigen::Index ncu = cfg.estimate_input_center ? nu : 0;
    const Eigen::Index nz = np + (with_shift ? nshift : 0) + ncu;

    struct Decoded {
        Vec p;
        UncertaintySpec spec;
    };
    auto decode = [&](const Vec& z) {
        Decoded d{z.head(np).cwiseProduct(pscale), spec};
        Eigen::Index at = np;
        if (with_shift) {
            d.spec.set_cdelta(z.segment(at, nshift));
            at += nshift;
        } else {
            d.spec.set_cdelta(Vec::Zero(nshift));
        }
        if (ncu > 0)
            d.spec.c_u = z.segment(at, ncu);
        return d;
    };

    ConformanceConfig inner = cfg.conform;
    inner.verify = false;
    inner.deadline = cfg.deadline;

    optim::NlpProblem prob;
    prob.x0 = Vec::Zero(nz);
    prob.x0.head(np) = p0.cwiseQuotient(pscale);
    if (ncu > 0)
        prob.x0.tail(ncu) = spec.c_u;
    prob.max_evaluations = cfg.max_evaluations;
    prob.restarts = cfg.restarts;
    prob.initial_step = cfg.initial_step;
    prob.deadline = cfg.deadline;
    prob.objective = [&](const Vec& z) {
        const auto d = decode(z);
        const Model mp = with_params(model, d.p);
        if (cfg.scheme == GrayScheme::Simultaneous) {
            const auto r = identify_white(mp, suite, d.spec, inner);
            return r.status == ConformanceStatus::Conformant ? r.cost : std::numeric_limits<double>::infinity();
        }
        const auto gos = build_gos(mp, suite, d.spec);
        if (cfg.scheme == GrayScheme::Sequential)
            return cost_under(gos, suite, d.spec, inner, with_shift);
        return cost_ls(gos, suite, d.spec, inner, with_shift);
    };
    const auto sol = optim::solve_nlp(prob, sub_seed(cfg.seed, 1));

    GrayboxResult res;
    const auto d = decode(sol.x);
    res.p = d.p;
    res.c_u = d.spec.c_u;
    res.nlp_value = sol.value;
    res.evaluations = sol.evaluations;
    UncertaintySpec final_spec = spec;
    final_spec.c_u = d.spec.c_u;
    ConformanceConfig fin = cfg.conform;
    fin.deadline = cfg.deadline;
    try {
        res.white = identify_white(with_params(model, res.p), suite, final_spec, fin);
    } catch (const SimulationDivergedError& e) {
        res.white.status = ConformanceStatus::Failed;
        res.white.cost = std::numeric_limits<double>::infinity();
        res.white.diagnostics = e.what();
    }
    return res;
}

std::string gray_result_json(const GrayboxResult& r)
{
    auto j = nlohmann::ordered_json::parse(result_json(r.white));
    j["p"] = std::vector<double>(r.p.data(), r.p.data() + r.p.size());
    j["rmse_p"] = r.rmse_p ? nlohmann::ordered_json(*r.rmse_p) : nlohmann::ordered_json(nullptr);
    return j.dump(2);
}

} // namespace reachconf
