#pragma once

#include "reachconf/models.hpp"
#include "reachconf/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reachconf::gp {

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Cos, Sin, Sqrt, Y, U, Const };

int arity(Op op);

/// Prefix-order node. Y: index = output, lag in 1..n_p. U: index = input,
/// lag in 0..n_p. Const: value.
struct Node {
    Op op = Op::Const;
    int index = 0;
    int lag = 0;
    double value = 0.0;
};

/// One-step-ahead regression rows. Column (lag - 1) * n_y + j of `ylag`
/// holds y_{k-lag, j}; column lag * n_u + j of `ulag` holds u_{k-lag, j}.
struct Dataset {
    int np = 1, ny = 0, nu = 0;
    Mat ylag, ulag;
    Mat target; ///< rows x n_y

    Eigen::Index rows() const { return target.rows(); }
};

/// Rows for every sample of every case at k >= n_p, using measured outputs
/// and nominal inputs plus `input_center`.
Dataset make_dataset(const TestSuite& suite, int np, const Vec& input_center);

struct Tree {
    std::vector<Node> nodes;

    int size() const { return static_cast<int>(nodes.size()); }
    int depth() const;
    /// Index one past the subtree rooted at `at`.
    int subtree_end(int at) const;
    double eval(const Mat& ywin, const Mat& uwin) const;
    Eigen::ArrayXd eval(const Dataset& d) const;
    std::string to_sexpr() const;
};

struct Gene {
    Tree tree;
    Eigen::ArrayXd cache; ///< evaluation on the training rows, empty when stale
};

/// Per output: genes and weights (one per gene, then the bias).
struct Individual {
    std::vector<std::vector<Gene>> genes;
    std::vector<Vec> weights;
    double cost = 0.0;

    int node_count() const;
    /// Bias plus weighted gene sum for every output.
    Vec eval(const Mat& ywin, const Mat& uwin) const;
};

struct TreeLimits {
    int max_depth = 5;
    int max_nodes = 25;
    int init_depth = 3;
    double const_probability = 0.15;
};

/// Random tree built with the grow method.
Tree random_tree(int np, int ny, int nu, int depth, const TreeLimits& lim, Rng& rng);

/// Least-squares gene weights with a bias term per output; returns the sum of
/// squared residuals (+inf for non-finite gene values).
double fit_weights(Individual& ind, const Dataset& d);

/// NARX model wrapping an individual; Jacobians by finite differences.
NarxModel to_narx(const Individual& ind, int np, int ny, int nu, const std::string& name = "gp");

std::string to_sexpr(const Individual& ind, int np, int ny, int nu);

struct ParsedIndividual {
    Individual ind;
    int np = 0, ny = 0, nu = 0;
};
/// Inverse of to_sexpr. Throws std::invalid_argument on malformed text.
ParsedIndividual parse_sexpr(const std::string& text);

} // namespace reachconf::gp
