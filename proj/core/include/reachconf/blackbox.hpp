#pragma once

#include "reachconf/conform.hpp"
#include "reachconf/gene.hpp"

#include <cstdint>
#include <string>

namespace reachconf {

struct EvolutionConfig {
    int np = 2;
    int population = 60;         ///< n_f
    int generations = 20;        ///< n_g
    int cgp_population = 20;     ///< n_f tilde
    int cgp_generations = 3;     ///< n_g tilde
    int subsets = 4;             ///< n_v
    int tournament = 4;
    double p_crossover = 0.84;
    double p_mutation = 0.14;
    double p_replication = 0.02;
    int max_genes = 4;
    gp::TreeLimits limits;
    double infeasible_penalty = 1e9;
    std::uint64_t seed = 0;
    ConformanceConfig conform;
    Deadline deadline;

    static EvolutionConfig desk(int np);
    static EvolutionConfig paper(int np);
    void validate() const;
};

using Population = std::vector<gp::Individual>;

/// Random initial population; each output gets 1..max_genes genes.
Population initial_population(int size, int ny, int nu, const EvolutionConfig& cfg, Rng& rng);

/// Least-squares weights and cost for every individual (in parallel).
void score_least_squares(Population& pop, const gp::Dataset& d);

/// Tournament pick: lowest cost, ties broken by fewer nodes.
const gp::Individual& tournament_select(const Population& pop, int size, Rng& rng);

/// Next generation of the same size. The best individual is copied first;
/// offspring have stale costs.
Population evolve(const Population& pop, int ny, int nu, const EvolutionConfig& cfg, Rng& rng);

/// Index of the best individual (cost, then node count).
std::size_t best_index(const Population& pop);

struct BlackboxResult {
    gp::Individual individual;
    std::string model_text; ///< s-expression
    ConformanceResult white;
    double ls_cost = 0.0;
    std::vector<double> best_cost_history;
};

/// Sum of conformance costs of a candidate over the subsets; infeasible or
/// failing subsets contribute the penalty.
double conformance_score(const gp::Individual& ind, const std::vector<TestSuite>& subsets, const UncertaintySpec& spec,
                         const EvolutionConfig& cfg, int ny, int nu);

/// Standard GP on least squares over `train`, then white-box sets on `conf`.
BlackboxResult identify_black_gp(const TestSuite& train, const TestSuite& conf, const UncertaintySpec& spec,
                                 const EvolutionConfig& cfg);

/// Conformant GP: least-squares phase on `train1`, conformance-cost phase on
/// the subsets of `train2`, then white-box sets on `conf`.
BlackboxResult identify_black_cgp(const TestSuite& train1, const TestSuite& train2, const TestSuite& conf,
                                  const UncertaintySpec& spec, const EvolutionConfig& cfg);

/// Split into n contiguous subsets of nearly equal size.
std::vector<TestSuite> split_suite(const TestSuite& s, int n);

} // namespace reachconf
