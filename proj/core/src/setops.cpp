#include "reachconf/setops.hpp"

#include "reachconf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reachconf {

Zonotope::Zonotope(Vec center) : center_(std::move(center)), generators_(center_.size(), 0) {}

Zonotope::Zonotope(Vec center, Mat generators)
    : center_(std::move(center)), generators_(std::move(generators))
{
    if (generators_.rows() != center_.size()) {
        if (generators_.size() == 0)
            generators_.resize(center_.size(), 0);
        else
            throw std::invalid_argument("Zonotope: generator rows must equal center length");
    }
}

bool HalfspacePoly::contains(const Vec& p, double tol) const
{
    if (p.size() != normals.cols())
        throw std::invalid_argument("HalfspacePoly::contains: dimension mismatch");
    return ((normals * p - offsets).array() <= tol).all();
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("minkowski_sum: dimension mismatch");
    Mat G(a.dim(), a.num_generators() + b.num_generators());
    G << a.generators(), b.generators();
    return Zonotope(a.center() + b.center(), std::move(G));
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b)
{
    const auto na = a.dim();
    const auto nb = b.dim();
    Vec c(na + nb);
    c << a.center(), b.center();
    Mat G = Mat::Zero(na + nb, a.num_generators() + b.num_generators());
    G.topLeftCorner(na, a.num_generators()) = a.generators();
    G.bottomRightCorner(nb, b.num_generators()) = b.generators();
    return Zonotope(std::move(c), std::move(G));
}

Zonotope linear_map(const Mat& A, const Zonotope& z)
{
    if (A.cols() != z.dim())
        throw std::invalid_argument("linear_map: matrix columns must equal zonotope dimension");
    return Zonotope(A * z.center(), A * z.generators());
}

double interval_norm(const Zonotope& z)
{
    return z.generators().cwiseAbs().sum();
}

namespace {

// Drop zero columns and merge parallel ones (g and -g count as parallel).
Mat merge_generators(const Mat& G)
{
    const auto n = G.rows();
    std::vector<Vec> dirs;
    std::vector<Vec> merged;
    const double scale = G.size() > 0 ? G.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
        Vec g = G.col(j);
        const double norm = g.norm();
        if (norm <= 1e-14 * std::max(1.0, scale))
            continue;
        Vec u = g / norm;
        Eigen::Index lead = 0;
        u.cwiseAbs().maxCoeff(&lead);
        if (u[lead] < 0.0) {
            u = -u;
            g = -g;
        }
        bool found = false;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            if ((dirs[i] - u).cwiseAbs().maxCoeff() <= 1e-10) {
                merged[i] += g;
                found = true;
                break;
            }
        }
        if (!found) {
            dirs.push_back(u);
            merged.push_back(g);
        }
    }
    Mat out(n, static_cast<Eigen::Index>(merged.size()));
    for (std::size_t i = 0; i < merged.size(); ++i)
        out.col(static_cast<Eigen::Index>(i)) = merged[i];
    return out;
}

// Generalized cross product of the n-1 columns of H (n x (n-1)).
Vec cross_product(const Mat& H)
{
    const auto n = H.rows();
    Vec v(n);
    if (n == 1) {
        v[0] = 1.0;
        return v;
    }
    Mat minor(n - 1, n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0)
            minor.topRows(i) = H.topRows(i);
        if (i < n - 1)
            minor.bottomRows(n - 1 - i) = H.bottomRows(n - 1 - i);
        const double det = minor.determinant();
        v[i] = (i % 2 == 0) ? det : -det;
    }
    return v;
}

} // namespace

Mat facet_normals(const Mat& generators, const Deadline& deadline)
{
    const auto n = generators.rows();
    if (n < 1)
        throw std::invalid_argument("facet_normals: dimension must be at least 1");
    const Mat G = merge_generators(generators);
    const auto eta = G.cols();
    if (eta < n)
        throw DegenerateSetError("facet_normals: generator matrix is rank deficient");
    {
        Eigen::FullPivLU<Mat> lu(G);
        lu.setThreshold(1e-12);
        if (lu.rank() < n)
            throw DegenerateSetError("facet_normals: generator matrix is rank deficient");
    }

    const Eigen::Index r = n - 1;
    std::vector<Vec> normals;
    std::vector<int> idx(static_cast<std::size_t>(r));
    std::iota(idx.begin(), idx.end(), 0);
    Mat H(n, r);
    Vec colnorm(eta);
    for (Eigen::Index j = 0; j < eta; ++j)
        colnorm[j] = G.col(j).norm();
    long counter = 0;
    while (true) {
        if ((++counter & 1023) == 0)
            deadline.check("facet_normals");
        double mag = 1.0;
        for (Eigen::Index i = 0; i < r; ++i) {
            H.col(i) = G.col(idx[static_cast<std::size_t>(i)]);
            mag *= colnorm[idx[static_cast<std::size_t>(i)]];
        }
        const Vec v = cross_product(H);
        const double vn = v.norm();
        if (vn > 1e-10 * mag) {
            const Vec u = v / vn;
            normals.push_back(u);
            normals.push_back(-u);
        }
        // Advance to the next r-subset in lexicographic order.
        Eigen::Index i = r - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == eta - r + i)
            --i;
        if (i < 0)
            break;
        ++idx[static_cast<std::size_t>(i)];
        for (Eigen::Index t = i + 1; t < r; ++t)
            idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
    }

    // Deduplicate along a fixed projection key, then compare within a window.
    Vec key_dir(n);
    for (Eigen::Index i = 0; i < n; ++i)
        key_dir[i] = 1.0 + 0.6180339887 * static_cast<double>(i) + 0.1 * std::sin(1.0 + i);
    const double window = 1e-10 * key_dir.cwiseAbs().sum();
    std::vector<std::pair<double, std::size_t>> keyed;
    keyed.reserve(normals.size());
    for (std::size_t i = 0; i < normals.size(); ++i)
        keyed.emplace_back(key_dir.dot(normals[i]), i);
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> kept;
    std::vector<double> kept_key;
    for (const auto& [key, i] : keyed) {
        bool dup = false;
        for (auto k = kept.size(); k-- > 0;) {
            if (key - kept_key[k] > window)
                break;
            if ((normals[kept[k]] - normals[i]).cwiseAbs().maxCoeff() <= 1e-10) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            kept.push_back(i);
            kept_key.push_back(key);
        }
    }
    Mat N(static_cast<Eigen::Index>(kept.size()), n);
    for (std::size_t k = 0; k < kept.size(); ++k)
        N.row(static_cast<Eigen::Index>(k)) = normals[kept[k]].transpose();
    return N;
}

HalfspacePoly to_halfspace(const Zonotope& z, const Deadline& deadline)
{
    HalfspacePoly hp;
    hp.normals = facet_normals(z.generators(), deadline);
    hp.offsets = hp.normals * z.center() + (hp.normals * z.generators()).cwiseAbs().rowwise().sum();
    return hp;
}

bool contains(const Zonotope& z, const Vec& p, double tol)
{
    if (p.size() != z.dim())
        throw std::invalid_argument("contains: dimension mismatch");
    const Vec r = p - z.center();
    const auto eta = z.num_generators();
    if (eta == 0)
        return r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol;

    optim::LpBuilder b;
    const double lam = 1.0 + tol;
    for (Eigen::Index j = 0; j < eta; ++j)
        b.add_var(0.0, -lam, lam);
    std::vector<int> slack(static_cast<std::size_t>(z.dim()));
    for (Eigen::Index i = 0; i < z.dim(); ++i)
        slack[static_cast<std::size_t>(i)] = b.add_var(0.0, -tol, tol);
    const Mat& G = z.generators();
    for (Eigen::Index i = 0; i < z.dim(); ++i) {
        std::vector<std::pair<int, double>> terms;
        for (Eigen::Index j = 0; j < eta; ++j) {
            if (G(i, j) != 0.0)
                terms.emplace_back(static_cast<int>(j), G(i, j));
        }
        terms.emplace_back(slack[static_cast<std::size_t>(i)], 1.0);
        b.add_eq(terms, r[i]);
    }
    optim::LpOptions opt;
    opt.feasibility_tol = 1e-11;
    const auto res = optim::solve_lp(b.build(), opt);
    return res.optimal();
}

double gauge(const Zonotope& z, const Vec& p, double tol)
{
    if (p.size() != z.dim())
        throw std::invalid_argument("gauge: dimension mismatch");
    const Vec r = p - z.center();
    const auto eta = z.num_generators();
    if (eta == 0)
        return (r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol) ? 0.0 : optim::kInf;

    optim::LpBuilder b;
    for (Eigen::Index j = 0; j < eta; ++j)
        b.add_var(0.0, -optim::kInf, optim::kInf);
    const int t = b.add_var(1.0, 0.0, optim::kInf);
    std::vector<int> slack(static_cast<std::size_t>(z.dim()));
    for (Eigen::Index i = 0; i < z.dim(); ++i)
        slack[static_cast<std::size_t>(i)] = b.add_var(0.0, -tol, tol);
    const Mat& G = z.generators();
    for (Eigen::Index i = 0; i < z.dim(); ++i) {
        std::vector<std::pair<int, double>> terms;
        for (Eigen::Index j = 0; j < eta; ++j) {
            if (G(i, j) != 0.0)
                terms.emplace_back(static_cast<int>(j), G(i, j));
        }
        terms.emplace_back(slack[static_cast<std::size_t>(i)], 1.0);
        b.add_eq(terms, r[i]);
    }
    for (Eigen::Index j = 0; j < eta; ++j) {
        b.add_le({{static_cast<int>(j), 1.0}, {t, -1.0}}, 0.0);
        b.add_le({{static_cast<int>(j), -1.0}, {t, -1.0}}, 0.0);
    }
    const auto res = optim::solve_lp(b.build());
    if (res.status == optim::LpStatus::Infeasible)
        return optim::kInf;
    if (!res.optimal())
        throw std::runtime_error("gauge: LP solver failed: " + res.diagnostics);
    return res.objective;
}

} // namespace reachconf
