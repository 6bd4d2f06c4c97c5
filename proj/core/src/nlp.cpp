#include "reachconf/nlp.hpp"

#include "reachconf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace reachconf::optim {

namespace {

constexpr double kBig = std::numeric_limits<double>::infinity();

class Evaluator {
public:
    explicit Evaluator(const NlpProblem& p) : p_(p) {}

    Vec clamp(Vec x) const
    {
        if (p_.lower.size() == x.size())
            x = x.cwiseMax(p_.lower);
        if (p_.upper.size() == x.size())
            x = x.cwiseMin(p_.upper);
        return x;
    }

    double operator()(const Vec& x)
    {
        ++count;
        double f = kBig;
        try {
            f = p_.objective(x);
        } catch (const TimeoutError&) {
            throw;
        } catch (const std::exception&) {
            f = kBig;
        }
        if (!std::isfinite(f))
            f = kBig;
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        return f;
    }

    bool exhausted() const { return count >= p_.max_evaluations || p_.deadline.expired(); }

    int count = 0;
    double best_f = kBig;
    Vec best_x;

private:
    const NlpProblem& p_;
};

// One Nelder-Mead run from the simplex around `start`. Returns true on
// convergence by tolerance.
bool nelder_mead(Evaluator& eval, const NlpProblem& p, const Vec& start, double step, int& iterations)
{
    const auto n = start.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    std::vector<Vec> xs(static_cast<std::size_t>(n + 1));
    std::vector<double> fs(static_cast<std::size_t>(n + 1));
    xs[0] = eval.clamp(start);
    fs[0] = eval(xs[0]);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec x = start;
        x[i] += step;
        x = eval.clamp(x);
        if ((x - start).cwiseAbs().maxCoeff() == 0.0) {
            x = start;
            x[i] -= step;
            x = eval.clamp(x);
        }
        xs[static_cast<std::size_t>(i + 1)] = x;
        fs[static_cast<std::size_t>(i + 1)] = eval(x);
    }

    std::vector<std::size_t> order(xs.size());
    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        {
            std::vector<Vec> xs2;
            std::vector<double> fs2;
            for (auto i : order) {
                xs2.push_back(xs[i]);
                fs2.push_back(fs[i]);
            }
            xs.swap(xs2);
            fs.swap(fs2);
        }
        double diam = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            diam = std::max(diam, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
        const double spread = std::isfinite(fs.back()) ? fs.back() - fs.front() : kBig;
        if (diam <= p.xtol && spread <= p.ftol)
            return true;
        if (diam <= p.xtol * 1e-3)
            return true;
        ++iterations;

        Vec centroid = Vec::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i)
            centroid += xs[static_cast<std::size_t>(i)];
        centroid /= dn;
        const std::size_t w = xs.size() - 1;

        const Vec xr = eval.clamp(centroid + alpha * (centroid - xs[w]));
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const Vec xe = eval.clamp(centroid + beta * (xr - centroid));
            const double fe = eval(xe);
            if (fe < fr) {
                xs[w] = xe;
                fs[w] = fe;
            } else {
                xs[w] = xr;
                fs[w] = fr;
            }
            continue;
        }
        if (fr < fs[w - 1]) {
            xs[w] = xr;
            fs[w] = fr;
            continue;
        }
        bool shrink = false;
        if (fr < fs[w]) {
            const Vec xc = eval.clamp(centroid + gamma * (xr - centroid));
            const double fc = eval(xc);
            if (fc <= fr) {
                xs[w] = xc;
                fs[w] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Vec xc = eval.clamp(centroid - gamma * (centroid - xs[w]));
            const double fc = eval(xc);
            if (fc < fs[w]) {
                xs[w] = xc;
                fs[w] = fc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t i = 1; i < xs.size(); ++i) {
                xs[i] = eval.clamp(xs[0] + delta * (xs[i] - xs[0]));
                fs[i] = eval(xs[i]);
            }
        }
    }
    return false;
}

} // namespace

NlpResult solve_nlp(const NlpProblem& problem, std::uint64_t seed)
{
    if (!problem.objective)
        throw std::invalid_argument("solve_nlp: objective is required");
    const auto n = problem.x0.size();
    if ((problem.lower.size() != 0 && problem.lower.size() != n) ||
        (problem.upper.size() != 0 && problem.upper.size() != n))
        throw std::invalid_argument("solve_nlp: bound length mismatch");

    Evaluator eval(problem);
    NlpResult res;
    const Vec x0 = eval.clamp(problem.x0);
    eval(x0);
    if (n == 0) {
        res.x = x0;
        res.value = eval.best_f;
        res.evaluations = eval.count;
        res.converged = true;
        return res;
    }

    Rng rng(seed);
    bool converged = nelder_mead(eval, problem, x0, problem.initial_step, res.iterations);
    for (int r = 0; r < problem.restarts && !eval.exhausted(); ++r) {
        Vec start = eval.best_x;
        const double scale = problem.initial_step * std::pow(0.5, r);
        for (Eigen::Index i = 0; i < n; ++i)
            start[i] += scale * rng.normal();
        converged = nelder_mead(eval, problem, start, scale, res.iterations);
    }
    res.x = eval.best_x;
    res.value = eval.best_f;
    res.evaluations = eval.count;
    res.converged = converged;
    return res;
}

} // namespace reachconf::optim
