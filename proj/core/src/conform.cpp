#include "reachconf/conform.hpp"

#include "reachconf/parallel.hpp"

#include <json.hpp>

#include <cmath>

namespace reachconf {

const char* to_string(ConstraintMode m)
{
    switch (m) {
    case ConstraintMode::Halfspace: return "halfspace";
    case ConstraintMode::Generator: return "generator";
    case ConstraintMode::Auto: return "auto";
    }
    return "auto";
}

ConstraintMode constraint_mode_from_string(const std::string& s)
{
    if (s == "halfspace")
        return ConstraintMode::Halfspace;
    if (s == "generator")
        return ConstraintMode::Generator;
    if (s == "auto")
        return ConstraintMode::Auto;
    throw std::invalid_argument("unknown constraint mode: " + s);
}

const char* to_string(ConformanceStatus s)
{
    switch (s) {
    case ConformanceStatus::Conformant: return "conformant";
    case ConformanceStatus::Infeasible: return "infeasible";
    case ConformanceStatus::Failed: return "failed";
    }
    return "failed";
}

double ConformanceConfig::weight(int k) const
{
    if (k >= 0 && static_cast<std::size_t>(k) < weights.size()) {
        if (weights[static_cast<std::size_t>(k)] < 0.0)
            throw std::invalid_argument("ConformanceConfig: weights must be nonnegative");
        return weights[static_cast<std::size_t>(k)];
    }
    return 1.0;
}

namespace {

bool uses_x(const GOModel& go, const UncertaintySpec& spec)
{
    return spec.eta_x() > 0 && spec.c_x.size() == go.nx;
}

} // namespace

DeviationSet deviation_set_matrices(const GOModel& go, const UncertaintySpec& spec, int k)
{
    if (k < go.first_valid || k >= go.nk)
        throw std::invalid_argument("deviation_set_matrices: step outside the valid range");
    const auto ks = static_cast<std::size_t>(k);
    const int ex = uses_x(go, spec) ? spec.eta_x() : 0;
    const int eu = spec.eta_u();
    if (spec.G_u.rows() != go.nu)
        throw std::invalid_argument("deviation_set_matrices: input template rows must equal n_u");
    DeviationSet ds;
    ds.gen.resize(go.ny, ex + (k + 1) * eu);
    ds.alpha_index.resize(static_cast<std::size_t>(ds.gen.cols()));
    Eigen::Index col = 0;
    if (ex > 0) {
        ds.gen.leftCols(ex) = go.Cbar[ks] * spec.G_x;
        for (int j = 0; j < ex; ++j)
            ds.alpha_index[static_cast<std::size_t>(j)] = j;
        col = ex;
    }
    const int ncx = static_cast<int>(spec.c_x.size());
    ds.center_map = Mat::Zero(go.ny, ncx + go.nu);
    if (ncx == go.nx && ncx > 0)
        ds.center_map.leftCols(ncx) = go.Cbar[ks];
    const int ex_all = spec.eta_x();
    for (int i = 0; i <= k; ++i) {
        const Mat& D = go.Dbar[ks][static_cast<std::size_t>(i)];
        ds.gen.middleCols(col, eu) = D * spec.G_u;
        for (int j = 0; j < eu; ++j)
            ds.alpha_index[static_cast<std::size_t>(col + j)] = ex_all + j;
        col += eu;
        ds.center_map.rightCols(go.nu) += D;
    }
    return ds;
}

Vec cost_vector(const std::vector<GOModel>& gos, const UncertaintySpec& spec, const ConformanceConfig& cfg)
{
    Vec gamma = Vec::Zero(spec.eta_x() + spec.eta_u());
    for (const auto& go : gos) {
        for (int k = go.first_valid; k < go.nk; ++k) {
            const double w = cfg.weight(k);
            if (w == 0.0)
                continue;
            const auto ds = deviation_set_matrices(go, spec, k);
            const Vec colsum = ds.gen.cwiseAbs().colwise().sum().transpose();
            for (Eigen::Index j = 0; j < colsum.size(); ++j)
                gamma[ds.alpha_index[static_cast<std::size_t>(j)]] += w * colsum[j];
        }
    }
    return gamma;
}

HalfspaceRows halfspace_constraints(const GOModel& go, const TestCase& c, const UncertaintySpec& spec, int k,
                                    const Deadline& deadline)
{
    const auto ds = deviation_set_matrices(go, spec, k);
    const Mat N = facet_normals(ds.gen, deadline);
    const Mat NG = N * ds.gen;
    HalfspaceRows rows;
    rows.P_alpha = Mat::Zero(N.rows(), spec.eta_x() + spec.eta_u());
    for (Eigen::Index j = 0; j < NG.cols(); ++j)
        rows.P_alpha.col(ds.alpha_index[static_cast<std::size_t>(j)]) += NG.col(j).cwiseAbs();
    rows.P_c = N * ds.center_map;
    Mat Y(N.cols(), c.num_samples());
    for (int s = 0; s < c.num_samples(); ++s)
        Y.col(s) = measurement_deviation(go, c, s, k);
    rows.rhs = Y.cols() > 0 ? Vec((N * Y).rowwise().maxCoeff())
                            : Vec::Constant(N.rows(), -std::numeric_limits<double>::infinity());
    return rows;
}

GeneratorBlock generator_constraints(const GOModel& go, const TestCase& c, const UncertaintySpec& spec, int k)
{
    auto ds = deviation_set_matrices(go, spec, k);
    GeneratorBlock b;
    b.Q_beta = std::move(ds.gen);
    b.Q_c = std::move(ds.center_map);
    b.alpha_index = std::move(ds.alpha_index);
    for (int s = 0; s < c.num_samples(); ++s)
        b.y_a.push_back(measurement_deviation(go, c, s, k));
    return b;
}

std::vector<GOModel> build_gos(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                               RemainderMode mode, std::uint64_t seed)
{
    std::vector<GOModel> gos(suite.cases.size());
    parallel_for(suite.cases.size(), [&](std::size_t m) {
        gos[m] = build_go(model, suite.cases[m], spec, mode, seed + m);
    });
    return gos;
}

namespace {

using Terms = std::vector<std::pair<int, double>>;

void assemble_halfspace(optim::LpBuilder& b, const std::vector<GOModel>& gos, const TestSuite& suite,
                        const UncertaintySpec& spec, const std::vector<int>& alpha_var,
                        const std::vector<int>& shift_var, const ConformanceConfig& cfg)
{
    std::vector<std::vector<HalfspaceRows>> blocks(gos.size());
    parallel_for(gos.size(), [&](std::size_t m) {
        for (int k = gos[m].first_valid; k < gos[m].nk; ++k)
            blocks[m].push_back(halfspace_constraints(gos[m], suite.cases[m], spec, k, cfg.deadline));
    });
    for (const auto& per_case : blocks) {
        for (const auto& rows : per_case) {
            for (Eigen::Index r = 0; r < rows.rhs.size(); ++r) {
                Terms t;
                for (Eigen::Index j = 0; j < rows.P_alpha.cols(); ++j)
                    if (rows.P_alpha(r, j) != 0.0)
                        t.emplace_back(alpha_var[static_cast<std::size_t>(j)], rows.P_alpha(r, j));
                for (Eigen::Index j = 0; j < rows.P_c.cols(); ++j)
                    if (shift_var[static_cast<std::size_t>(j)] >= 0 && rows.P_c(r, j) != 0.0)
                        t.emplace_back(shift_var[static_cast<std::size_t>(j)], rows.P_c(r, j));
                b.add_ge(t, rows.rhs[r]);
            }
        }
    }
}

void assemble_generator(optim::LpBuilder& b, const std::vector<GOModel>& gos, const TestSuite& suite,
                        const UncertaintySpec& spec, const std::vector<int>& alpha_var,
                        const std::vector<int>& shift_var)
{
    for (std::size_t m = 0; m < gos.size(); ++m) {
        const auto& go = gos[m];
        for (int k = go.first_valid; k < go.nk; ++k) {
            const auto blk = generator_constraints(go, suite.cases[m], spec, k);
            std::vector<Eigen::Index> live;
            for (Eigen::Index j = 0; j < blk.Q_beta.cols(); ++j)
                if (blk.Q_beta.col(j).cwiseAbs().maxCoeff() > 0.0)
                    live.push_back(j);
            for (const auto& ya : blk.y_a) {
                std::vector<int> beta(live.size());
                for (std::size_t j = 0; j < live.size(); ++j) {
                    beta[j] = b.add_var(0.0, -optim::kInf, optim::kInf);
                    const int a = alpha_var[static_cast<std::size_t>(blk.alpha_index[static_cast<std::size_t>(live[j])])];
                    b.add_le({{beta[j], 1.0}, {a, -1.0}}, 0.0);
                    b.add_le({{beta[j], -1.0}, {a, -1.0}}, 0.0);
                }
                for (Eigen::Index r = 0; r < blk.Q_beta.rows(); ++r) {
                    Terms t;
                    for (std::size_t j = 0; j < live.size(); ++j) {
                        const double v = blk.Q_beta(r, live[j]);
                        if (v != 0.0)
                            t.emplace_back(beta[j], v);
                    }
                    for (Eigen::Index j = 0; j < blk.Q_c.cols(); ++j)
                        if (shift_var[static_cast<std::size_t>(j)] >= 0 && blk.Q_c(r, j) != 0.0)
                            t.emplace_back(shift_var[static_cast<std::size_t>(j)], blk.Q_c(r, j));
                    b.add_eq(t, ya[r]);
                }
            }
        }
    }
}

} // namespace

double containment_rate(const std::vector<GOModel>& gos, const TestSuite& suite, const UncertaintySpec& spec,
                        double tol, bool overapprox)
{
    std::vector<long> inside(gos.size(), 0);
    std::vector<long> total(gos.size(), 0);
    parallel_for(gos.size(), [&](std::size_t m) {
        const auto& go = gos[m];
        const auto& c = suite.cases[m];
        for (int k = go.first_valid; k < go.nk; ++k) {
            const Zonotope R = reach_go(go, spec, k, overapprox);
            const Zonotope Z(R.center() - go.ybar[static_cast<std::size_t>(k)], R.generators());
            for (int s = 0; s < c.num_samples(); ++s) {
                ++total[m];
                if (contains(Z, measurement_deviation(go, c, s, k), tol))
                    ++inside[m];
            }
        }
    });
    long in = 0;
    long all = 0;
    for (std::size_t m = 0; m < gos.size(); ++m) {
        in += inside[m];
        all += total[m];
    }
    return all == 0 ? 1.0 : static_cast<double>(in) / static_cast<double>(all);
}

ConformanceResult identify_white_go(const std::vector<GOModel>& gos, const TestSuite& suite,
                                    const UncertaintySpec& spec, const std::vector<bool>& shift_mask,
                                    const ConformanceConfig& cfg)
{
    if (gos.empty() || gos.size() != suite.cases.size())
        throw std::invalid_argument("identify_white: suite must be nonempty and match the GO models");
    const int eta = spec.eta_x() + spec.eta_u();
    const int nshift = static_cast<int>(spec.c_x.size() + spec.c_u.size());
    if (!shift_mask.empty() && static_cast<int>(shift_mask.size()) != nshift)
        throw std::invalid_argument("identify_white: shift mask length mismatch");
    bool any_weight = false;
    for (int k = 0; k < gos.front().nk; ++k)
        any_weight |= cfg.weight(k) > 0.0;
    if (!any_weight)
        throw std::invalid_argument("identify_white: at least one weight must be positive");

    // Free shifts: a maximal subset of the masked ones with independent output effects.
    std::vector<bool> free_shift(static_cast<std::size_t>(nshift), false);
    if (!shift_mask.empty()) {
        std::vector<int> cols;
        for (int j = 0; j < nshift; ++j)
            if (shift_mask[static_cast<std::size_t>(j)])
                cols.push_back(j);
        if (!cols.empty()) {
            const auto& go = gos.front();
            Mat effect = Mat::Zero(static_cast<Eigen::Index>(go.nk) * go.ny, static_cast<Eigen::Index>(cols.size()));
            for (int k = go.first_valid; k < go.nk; ++k) {
                const Mat cm = deviation_set_matrices(go, spec, k).center_map;
                for (std::size_t c = 0; c < cols.size(); ++c)
                    effect.block(static_cast<Eigen::Index>(k) * go.ny, static_cast<Eigen::Index>(c), go.ny, 1) =
                        cm.col(cols[c]);
            }
            Eigen::ColPivHouseholderQR<Mat> qr(effect);
            qr.setThreshold(1e-10);
            for (Eigen::Index r = 0; r < qr.rank(); ++r)
                free_shift[static_cast<std::size_t>(cols[static_cast<std::size_t>(qr.colsPermutation().indices()[r])])] =
                    true;
        }
    }

    ConstraintMode mode = cfg.mode;
    if (mode == ConstraintMode::Auto)
        mode = gos.front().ny <= 3 ? ConstraintMode::Halfspace : ConstraintMode::Generator;

    const Vec gamma = cost_vector(gos, spec, cfg);

    auto build = [&](ConstraintMode md, std::vector<int>& alpha_var, std::vector<int>& shift_var) {
        optim::LpBuilder b;
        alpha_var.assign(static_cast<std::size_t>(eta), -1);
        shift_var.assign(static_cast<std::size_t>(nshift), -1);
        for (int j = 0; j < eta; ++j)
            alpha_var[static_cast<std::size_t>(j)] = b.add_var(gamma[j], 0.0, optim::kInf);
        for (int j = 0; j < nshift; ++j)
            if (free_shift[static_cast<std::size_t>(j)])
                shift_var[static_cast<std::size_t>(j)] = b.add_var(0.0, -optim::kInf, optim::kInf);
        if (md == ConstraintMode::Halfspace)
            assemble_halfspace(b, gos, suite, spec, alpha_var, shift_var, cfg);
        else
            assemble_generator(b, gos, suite, spec, alpha_var, shift_var);
        return b.build();
    };

    std::vector<int> alpha_var, shift_var;
    optim::LinearProgram lp;
    try {
        lp = build(mode, alpha_var, shift_var);
    } catch (const DegenerateSetError&) {
        if (cfg.mode != ConstraintMode::Auto)
            throw;
        mode = ConstraintMode::Generator;
        lp = build(mode, alpha_var, shift_var);
    }

    ConformanceResult res;
    res.mode_used = mode;
    res.lp_rows = static_cast<int>(lp.num_rows());
    res.lp_cols = static_cast<int>(lp.num_vars());
    res.spec = spec;
    res.alpha = Vec::Zero(eta);
    res.cdelta = Vec::Zero(nshift);

    auto opts = cfg.lp;
    opts.deadline = cfg.deadline;
    const auto sol = optim::solve_lp(lp, opts);
    res.diagnostics = sol.diagnostics;
    if (sol.status == optim::LpStatus::Infeasible) {
        res.status = ConformanceStatus::Infeasible;
        res.cost = std::numeric_limits<double>::infinity();
        return res;
    }
    if (!sol.optimal()) {
        res.status = ConformanceStatus::Failed;
        res.cost = std::numeric_limits<double>::infinity();
        res.diagnostics = std::string("LP ") + optim::to_string(sol.status) + ": " + sol.diagnostics;
        return res;
    }
    for (int j = 0; j < eta; ++j)
        res.alpha[j] = std::max(0.0, sol.x[alpha_var[static_cast<std::size_t>(j)]]);
    for (int j = 0; j < nshift; ++j)
        if (shift_var[static_cast<std::size_t>(j)] >= 0)
            res.cdelta[j] = sol.x[shift_var[static_cast<std::size_t>(j)]];
    res.cost = gamma.dot(res.alpha);
    res.spec.set_alpha(res.alpha);
    res.spec.set_cdelta(res.cdelta);
    res.status = ConformanceStatus::Conformant;
    res.containment_rate = -1.0;
    if (cfg.verify) {
        res.containment_rate = containment_rate(gos, suite, res.spec, cfg.verify_tol);
        if (res.containment_rate < 1.0) {
            res.status = ConformanceStatus::Failed;
            res.diagnostics += " post-hoc containment check failed";
        }
    }
    return res;
}

ConformanceResult identify_white(const Model& model, const TestSuite& suite, const UncertaintySpec& spec,
                                 const ConformanceConfig& cfg)
{
    if (suite.cases.empty())
        throw std::invalid_argument("identify_white: empty suite");
    spec.validate();
    suite.validate(num_outputs(model));
    if (is_narx(model) && spec.eta_x() > 0)
        throw std::invalid_argument("identify_white: NARX models take no initial-state templates");
    const auto gos = build_gos(model, suite, spec);
    const auto nshift = static_cast<std::size_t>(spec.c_x.size() + spec.c_u.size());
    const std::vector<bool> mask(is_linear(model) ? nshift : 0, true);
    return identify_white_go(gos, suite, spec, mask, cfg);
}

GOModel augment_additive(const GOModel& go)
{
    GOModel out = go;
    out.nu = go.nu + go.ny;
    out.ubar.conservativeResize(out.nu, Eigen::NoChange);
    out.ubar.bottomRows(go.ny).setZero();
    for (int k = 0; k < go.nk; ++k) {
        auto& Dk = out.Dbar[static_cast<std::size_t>(k)];
        for (int i = 0; i <= k; ++i) {
            Mat D = Mat::Zero(go.ny, out.nu);
            D.leftCols(go.nu) = go.Dbar[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            if (i == k)
                D.rightCols(go.ny).setIdentity();
            Dk[static_cast<std::size_t>(i)] = D;
        }
    }
    return out;
}

UncertaintySpec additive_spec(const UncertaintySpec& spec, int ny)
{
    UncertaintySpec s;
    const auto nx = spec.c_x.size();
    const auto nu = spec.c_u.size();
    s.c_x = spec.c_x;
    s.G_x = Mat::Zero(nx, 0);
    s.alpha_x = Vec::Zero(0);
    s.cdelta_x = Vec::Zero(nx);
    s.c_u = Vec::Zero(nu + ny);
    s.c_u.head(nu) = spec.c_u;
    s.G_u = Mat::Zero(nu + ny, ny);
    s.G_u.bottomRows(ny).setIdentity();
    s.alpha_u = Vec::Ones(ny);
    s.cdelta_u = Vec::Zero(nu + ny);
    return s;
}

ConformanceResult identify_white_additive(const Model& model, const TestSuite& suite,
                                          const UncertaintySpec& spec, const ConformanceConfig& cfg)
{
    if (suite.cases.empty())
        throw std::invalid_argument("identify_white_additive: empty suite");
    spec.validate();
    suite.validate(num_outputs(model));
    const int ny = num_outputs(model);
    auto gos = build_gos(model, suite, spec);
    for (auto& go : gos)
        go = augment_additive(go);
    const auto aspec = additive_spec(spec, ny);
    const auto nshift = static_cast<std::size_t>(aspec.c_x.size() + aspec.c_u.size());
    std::vector<bool> mask;
    if (is_linear(model)) {
        mask.assign(nshift, false);
        for (int j = 0; j < ny; ++j)
            mask[nshift - 1 - static_cast<std::size_t>(j)] = true;
    }
    auto res = identify_white_go(gos, suite, aspec, mask, cfg);
    res.additive = true;
    return res;
}

double validation_containment(const Model& model, const ConformanceResult& result, const TestSuite& suite,
                              RemainderMode mode, double tol)
{
    if (!result.additive) {
        const auto gos = build_gos(model, suite, result.spec, mode);
        return containment_rate(gos, suite, result.spec, tol, mode != RemainderMode::Zero);
    }
    const int nu = num_inputs(model);
    UncertaintySpec base;
    base.c_x = result.spec.c_x;
    base.G_x = Mat::Zero(base.c_x.size(), 0);
    base.alpha_x = Vec::Zero(0);
    base.cdelta_x = Vec::Zero(base.c_x.size());
    base.c_u = result.spec.c_u.head(nu);
    base.G_u = Mat::Zero(nu, 0);
    base.alpha_u = Vec::Zero(0);
    base.cdelta_u = Vec::Zero(nu);
    auto gos = build_gos(model, suite, base);
    for (auto& go : gos)
        go = augment_additive(go);
    return containment_rate(gos, suite, result.spec, tol, false);
}

std::string result_json(const ConformanceResult& r)
{
    nlohmann::ordered_json j;
    j["alpha"] = std::vector<double>(r.alpha.data(), r.alpha.data() + r.alpha.size());
    j["cdelta"] = std::vector<double>(r.cdelta.data(), r.cdelta.data() + r.cdelta.size());
    j["cost"] = std::isfinite(r.cost) ? nlohmann::ordered_json(r.cost) : nlohmann::ordered_json(nullptr);
    j["status"] = to_string(r.status);
    j["containment_rate"] = r.containment_rate;
    return j.dump(2);
}

} // namespace reachconf
