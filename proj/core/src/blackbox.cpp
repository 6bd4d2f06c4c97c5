#include "reachconf/blackbox.hpp"

#include "reachconf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reachconf {

EvolutionConfig EvolutionConfig::desk(int np)
{
    EvolutionConfig c;
    c.np = np;
    return c;
}

EvolutionConfig EvolutionConfig::paper(int np)
{
    EvolutionConfig c;
    c.np = np;
    c.population = 300;
    c.generations = 95;
    c.cgp_population = 100;
    c.cgp_generations = 5;
    c.subsets = 10;
    return c;
}

void EvolutionConfig::validate() const
{
    if (np < 1 || population < 2 || generations < 0 || cgp_generations < 0 || tournament < 1 || max_genes < 1)
        throw std::invalid_argument("EvolutionConfig: invalid sizes");
    if (cgp_population < 1 || cgp_population > population)
        throw std::invalid_argument("EvolutionConfig: need 1 <= cgp_population <= population");
    if (subsets < 1)
        throw std::invalid_argument("EvolutionConfig: need at least one subset");
    if (p_crossover < 0 || p_mutation < 0 || p_replication < 0 || p_crossover + p_mutation + p_replication > 1.0 + 1e-12)
        throw std::invalid_argument("EvolutionConfig: probabilities must be nonnegative and sum to at most 1");
}

Population initial_population(int size, int ny, int nu, const EvolutionConfig& cfg, Rng& rng)
{
    Population pop(static_cast<std::size_t>(size));
    for (auto& ind : pop) {
        ind.genes.resize(static_cast<std::size_t>(ny));
        for (auto& out : ind.genes) {
            const int n = 1 + rng.below(cfg.max_genes);
            for (int g = 0; g < n; ++g) {
                const int depth = 1 + rng.below(cfg.limits.init_depth);
                out.push_back(gp::Gene{gp::random_tree(cfg.np, ny, nu, depth, cfg.limits, rng), {}});
            }
        }
    }
    return pop;
}

void score_least_squares(Population& pop, const gp::Dataset& d)
{
    parallel_for(pop.size(), [&](std::size_t i) { gp::fit_weights(pop[i], d); });
}

namespace {

bool better(const gp::Individual& a, const gp::Individual& b)
{
    if (a.cost != b.cost)
        return a.cost < b.cost;
    return a.node_count() < b.node_count();
}

bool within_limits(const gp::Tree& t, const gp::TreeLimits& lim)
{
    return t.size() <= lim.max_nodes && t.depth() <= lim.max_depth;
}

gp::Tree splice(const gp::Tree& host, int at, const gp::Tree& donor, int dat)
{
    gp::Tree out;
    const int hend = host.subtree_end(at);
    const int dend = donor.subtree_end(dat);
    out.nodes.assign(host.nodes.begin(), host.nodes.begin() + at);
    out.nodes.insert(out.nodes.end(), donor.nodes.begin() + dat, donor.nodes.begin() + dend);
    out.nodes.insert(out.nodes.end(), host.nodes.begin() + hend, host.nodes.end());
    return out;
}

void mutate(gp::Individual& ind, int ny, int nu, const EvolutionConfig& cfg, Rng& rng)
{
    auto& out = ind.genes[static_cast<std::size_t>(rng.below(ny))];
    const double r = rng.uniform();
    if (r < 0.1 && static_cast<int>(out.size()) < cfg.max_genes) {
        out.push_back(gp::Gene{gp::random_tree(cfg.np, ny, nu, 1 + rng.below(cfg.limits.init_depth), cfg.limits, rng), {}});
        return;
    }
    if (r < 0.2 && out.size() > 1) {
        out.erase(out.begin() + rng.below(static_cast<int>(out.size())));
        return;
    }
    auto& gene = out[static_cast<std::size_t>(rng.below(static_cast<int>(out.size())))];
    const int at = rng.below(gene.tree.size());
    if (r < 0.3 && gene.tree.nodes[static_cast<std::size_t>(at)].op == gp::Op::Const) {
        gene.tree.nodes[static_cast<std::size_t>(at)].value += rng.normal(0.0, 1.0);
        gene.cache.resize(0);
        return;
    }
    for (int attempt = 0; attempt < 10; ++attempt) {
        const auto sub = gp::random_tree(cfg.np, ny, nu, 1 + rng.below(3), cfg.limits, rng);
        auto t = splice(gene.tree, at, sub, 0);
        if (within_limits(t, cfg.limits)) {
            gene.tree = std::move(t);
            gene.cache.resize(0);
            return;
        }
    }
}

void crossover(gp::Individual& a, gp::Individual& b, int ny, const EvolutionConfig& cfg, Rng& rng)
{
    const auto o = static_cast<std::size_t>(rng.below(ny));
    auto& ga = a.genes[o];
    auto& gb = b.genes[o];
    const auto ia = static_cast<std::size_t>(rng.below(static_cast<int>(ga.size())));
    const auto ib = static_cast<std::size_t>(rng.below(static_cast<int>(gb.size())));
    if (rng.bernoulli(0.5)) {
        std::swap(ga[ia], gb[ib]);
        return;
    }
    const auto& ta = ga[ia].tree;
    const auto& tb = gb[ib].tree;
    for (int attempt = 0; attempt < 10; ++attempt) {
        const int pa = rng.below(ta.size());
        const int pb = rng.below(tb.size());
        auto ca = splice(ta, pa, tb, pb);
        auto cb = splice(tb, pb, ta, pa);
        if (within_limits(ca, cfg.limits) && within_limits(cb, cfg.limits)) {
            ga[ia] = gp::Gene{std::move(ca), {}};
            gb[ib] = gp::Gene{std::move(cb), {}};
            return;
        }
    }
}

} // namespace

std::size_t best_index(const Population& pop)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (better(pop[i], pop[best]))
            best = i;
    return best;
}

const gp::Individual& tournament_select(const Population& pop, int size, Rng& rng)
{
    const gp::Individual* best = nullptr;
    for (int i = 0; i < size; ++i) {
        const auto& c = pop[static_cast<std::size_t>(rng.below(static_cast<int>(pop.size())))];
        if (!best || better(c, *best))
            best = &c;
    }
    return *best;
}

Population evolve(const Population& pop, int ny, int nu, const EvolutionConfig& cfg, Rng& rng)
{
    if (pop.empty())
        throw std::invalid_argument("evolve: empty population");
    Population next;
    next.reserve(pop.size());
    next.push_back(pop[best_index(pop)]);
    const double total = cfg.p_crossover + cfg.p_mutation + cfg.p_replication;
    while (next.size() < pop.size()) {
        const double r = rng.uniform() * (total > 0.0 ? total : 1.0);
        if (r < cfg.p_crossover) {
            auto a = tournament_select(pop, cfg.tournament, rng);
            auto b = tournament_select(pop, cfg.tournament, rng);
            crossover(a, b, ny, cfg, rng);
            next.push_back(std::move(a));
            if (next.size() < pop.size())
                next.push_back(std::move(b));
        } else if (r < cfg.p_crossover + cfg.p_mutation) {
            auto a = tournament_select(pop, cfg.tournament, rng);
            mutate(a, ny, nu, cfg, rng);
            next.push_back(std::move(a));
        } else {
            next.push_back(tournament_select(pop, cfg.tournament, rng));
        }
    }
    return next;
}

std::vector<TestSuite> split_suite(const TestSuite& s, int n)
{
    if (n < 1 || n > s.num_cases())
        throw std::invalid_argument("split_suite: need 1 <= n <= number of cases");
    std::vector<TestSuite> out(static_cast<std::size_t>(n));
    const int m = s.num_cases();
    for (int i = 0; i < n; ++i) {
        const int lo = i * m / n;
        const int hi = (i + 1) * m / n;
        out[static_cast<std::size_t>(i)].cases.assign(s.cases.begin() + lo, s.cases.begin() + hi);
    }
    return out;
}

namespace {

int suite_ny(const TestSuite& s) { return static_cast<int>(s.cases.front().samples.front().rows()); }
int suite_nu(const TestSuite& s) { return static_cast<int>(s.cases.front().nominal_u.rows()); }

ConformanceResult finalize(const gp::Individual& ind, const TestSuite& conf, const UncertaintySpec& spec,
                           const EvolutionConfig& cfg, int ny, int nu)
{
    const auto model = gp::to_narx(ind, cfg.np, ny, nu);
    try {
        return identify_white(model, conf, spec, cfg.conform);
    } catch (const SimulationDivergedError& e) {
        ConformanceResult r;
        r.status = ConformanceStatus::Failed;
        r.cost = std::numeric_limits<double>::infinity();
        r.diagnostics = e.what();
        return r;
    }
}

Population run_least_squares(Population pop, const gp::Dataset& d, int generations, int ny, int nu,
                             const EvolutionConfig& cfg, Rng& rng, std::vector<double>& history)
{
    score_least_squares(pop, d);
    history.push_back(pop[best_index(pop)].cost);
    for (int g = 0; g < generations; ++g) {
        cfg.deadline.check("genetic programming");
        pop = evolve(pop, ny, nu, cfg, rng);
        score_least_squares(pop, d);
        history.push_back(pop[best_index(pop)].cost);
    }
    return pop;
}

} // namespace

double conformance_score(const gp::Individual& ind, const std::vector<TestSuite>& subsets, const UncertaintySpec& spec,
                         const EvolutionConfig& cfg, int ny, int nu)
{
    if (!std::isfinite(ind.cost))
        return cfg.infeasible_penalty * static_cast<double>(subsets.size());
    const auto model = gp::to_narx(ind, cfg.np, ny, nu);
    ConformanceConfig cc = cfg.conform;
    cc.verify = false;
    double total = 0.0;
    for (const auto& s : subsets) {
        double c = cfg.infeasible_penalty;
        try {
            const auto r = identify_white(model, s, spec, cc);
            if (r.conformant() && std::isfinite(r.cost))
                c = std::min(r.cost, cfg.infeasible_penalty);
        } catch (const TimeoutError&) {
            throw;
        } catch (const std::exception&) {
        }
        total += c;
    }
    return total;
}

BlackboxResult identify_black_gp(const TestSuite& train, const TestSuite& conf, const UncertaintySpec& spec,
                                 const EvolutionConfig& cfg)
{
    cfg.validate();
    const int ny = suite_ny(train);
    const int nu = suite_nu(train);
    Rng rng(sub_seed(cfg.seed, 10));
    const auto d = gp::make_dataset(train, cfg.np, spec.c_u);
    BlackboxResult res;
    auto pop = initial_population(cfg.population, ny, nu, cfg, rng);
    pop = run_least_squares(std::move(pop), d, cfg.generations + cfg.cgp_generations, ny, nu, cfg, rng,
                            res.best_cost_history);
    res.individual = pop[best_index(pop)];
    res.ls_cost = res.individual.cost;
    res.model_text = gp::to_sexpr(res.individual, cfg.np, ny, nu);
    res.white = finalize(res.individual, conf, spec, cfg, ny, nu);
    return res;
}

BlackboxResult identify_black_cgp(const TestSuite& train1, const TestSuite& train2, const TestSuite& conf,
                                  const UncertaintySpec& spec, const EvolutionConfig& cfg)
{
    cfg.validate();
    const int ny = suite_ny(train1);
    const int nu = suite_nu(train1);
    Rng rng(sub_seed(cfg.seed, 10));
    const auto d = gp::make_dataset(train1, cfg.np, spec.c_u);
    const auto subsets = split_suite(train2, cfg.subsets);
    BlackboxResult res;
    auto pop = initial_population(cfg.population, ny, nu, cfg, rng);
    pop = run_least_squares(std::move(pop), d, cfg.generations, ny, nu, cfg, rng, res.best_cost_history);

    std::sort(pop.begin(), pop.end(), better);
    pop.resize(static_cast<std::size_t>(cfg.cgp_population));
    for (int i = 0; i < cfg.cgp_generations; ++i) {
        cfg.deadline.check("conformant genetic programming");
        std::vector<double> score(pop.size());
        parallel_for(pop.size(), [&](std::size_t j) {
            score[j] = conformance_score(pop[j], subsets, spec, cfg, ny, nu);
        });
        for (std::size_t j = 0; j < pop.size(); ++j)
            pop[j].cost = score[j];
        res.best_cost_history.push_back(pop[best_index(pop)].cost);
        if (i + 1 < cfg.cgp_generations) {
            pop = evolve(pop, ny, nu, cfg, rng);
            score_least_squares(pop, d);
        }
    }
    gp::Individual best = pop[best_index(pop)];
    const double conf_score = best.cost;
    gp::fit_weights(best, d);
    res.ls_cost = best.cost;
    best.cost = conf_score;
    res.individual = best;
    res.model_text = gp::to_sexpr(best, cfg.np, ny, nu);
    res.white = finalize(best, conf, spec, cfg, ny, nu);
    return res;
}

} // namespace reachconf
