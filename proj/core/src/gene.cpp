#include "reachconf/gene.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace reachconf::gp {

int arity(Op op)
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Cos:
    case Op::Sin:
    case Op::Sqrt: return 1;
    default: return 0;
    }
}

namespace {

constexpr double kDivGuard = 1e-9;

double apply(Op op, double a, double b)
{
    switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return std::abs(b) < kDivGuard ? a : a / b;
    case Op::Cos: return std::cos(a);
    case Op::Sin: return std::sin(a);
    case Op::Sqrt: return std::sqrt(std::abs(a));
    default: return 0.0;
    }
}

const char* op_name(Op op)
{
    switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "pdiv";
    case Op::Cos: return "cos";
    case Op::Sin: return "sin";
    case Op::Sqrt: return "sqrtabs";
    case Op::Y: return "y";
    case Op::U: return "u";
    case Op::Const: return "c";
    }
    return "?";
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double eval_scalar(const std::vector<Node>& n, int& at, const Mat& yw, const Mat& uw)
{
    const Node& node = n[static_cast<std::size_t>(at++)];
    switch (node.op) {
    case Op::Y: return yw(node.index, yw.cols() - node.lag);
    case Op::U: return uw(node.index, uw.cols() - 1 - node.lag);
    case Op::Const: return node.value;
    default: break;
    }
    const double a = eval_scalar(n, at, yw, uw);
    const double b = arity(node.op) == 2 ? eval_scalar(n, at, yw, uw) : 0.0;
    return apply(node.op, a, b);
}

Eigen::ArrayXd eval_rows(const std::vector<Node>& n, int& at, const Dataset& d)
{
    const Node& node = n[static_cast<std::size_t>(at++)];
    switch (node.op) {
    case Op::Y: return d.ylag.col((node.lag - 1) * d.ny + node.index).array();
    case Op::U: return d.ulag.col(node.lag * d.nu + node.index).array();
    case Op::Const: return Eigen::ArrayXd::Constant(d.rows(), node.value);
    default: break;
    }
    Eigen::ArrayXd a = eval_rows(n, at, d);
    switch (node.op) {
    case Op::Cos: return a.cos();
    case Op::Sin: return a.sin();
    case Op::Sqrt: return a.abs().sqrt();
    default: break;
    }
    const Eigen::ArrayXd b = eval_rows(n, at, d);
    switch (node.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    default: return (b.abs() < kDivGuard).select(a, a / b);
    }
}

int depth_at(const std::vector<Node>& n, int& at)
{
    const Node& node = n[static_cast<std::size_t>(at++)];
    int d = 0;
    for (int i = 0; i < arity(node.op); ++i)
        d = std::max(d, depth_at(n, at));
    return d + 1;
}

void sexpr_at(const std::vector<Node>& n, int& at, std::string& out)
{
    const Node& node = n[static_cast<std::size_t>(at++)];
    switch (node.op) {
    case Op::Y:
    case Op::U:
        out += "(" + std::string(op_name(node.op)) + " " + std::to_string(node.index + 1) + " " +
               std::to_string(node.lag) + ")";
        return;
    case Op::Const: out += num(node.value); return;
    default: break;
    }
    out += "(";
    out += op_name(node.op);
    for (int i = 0; i < arity(node.op); ++i) {
        out += " ";
        sexpr_at(n, at, out);
    }
    out += ")";
}

} // namespace

Dataset make_dataset(const TestSuite& suite, int np, const Vec& input_center)
{
    if (suite.cases.empty() || suite.cases.front().samples.empty())
        throw std::invalid_argument("make_dataset: empty suite");
    Dataset d;
    d.np = np;
    d.ny = static_cast<int>(suite.cases.front().samples.front().rows());
    d.nu = static_cast<int>(suite.cases.front().nominal_u.rows());
    if (input_center.size() != d.nu)
        throw std::invalid_argument("make_dataset: input center length mismatch");
    Eigen::Index rows = 0;
    for (const auto& c : suite.cases)
        rows += static_cast<Eigen::Index>(c.num_samples()) * std::max(0, c.num_steps() - np);
    d.ylag.resize(rows, d.ny * np);
    d.ulag.resize(rows, d.nu * (np + 1));
    d.target.resize(rows, d.ny);
    Eigen::Index r = 0;
    for (const auto& c : suite.cases) {
        const Mat u = c.nominal_u.colwise() + input_center;
        for (const auto& y : c.samples) {
            for (int k = np; k < c.num_steps(); ++k, ++r) {
                for (int l = 1; l <= np; ++l)
                    d.ylag.row(r).segment((l - 1) * d.ny, d.ny) = y.col(k - l).transpose();
                for (int l = 0; l <= np; ++l)
                    d.ulag.row(r).segment(l * d.nu, d.nu) = u.col(k - l).transpose();
                d.target.row(r) = y.col(k).transpose();
            }
        }
    }
    return d;
}

int Tree::depth() const
{
    if (nodes.empty())
        return 0;
    int at = 0;
    return depth_at(nodes, at);
}

int Tree::subtree_end(int at) const
{
    int need = 1;
    while (need > 0) {
        need += arity(nodes[static_cast<std::size_t>(at)].op) - 1;
        ++at;
    }
    return at;
}

double Tree::eval(const Mat& ywin, const Mat& uwin) const
{
    int at = 0;
    return eval_scalar(nodes, at, ywin, uwin);
}

Eigen::ArrayXd Tree::eval(const Dataset& d) const
{
    int at = 0;
    return eval_rows(nodes, at, d);
}

std::string Tree::to_sexpr() const
{
    std::string out;
    int at = 0;
    sexpr_at(nodes, at, out);
    return out;
}

int Individual::node_count() const
{
    int n = 0;
    for (const auto& out : genes)
        for (const auto& g : out)
            n += g.tree.size();
    return n;
}

Vec Individual::eval(const Mat& ywin, const Mat& uwin) const
{
    Vec y(static_cast<Eigen::Index>(genes.size()));
    for (std::size_t o = 0; o < genes.size(); ++o) {
        const Vec& w = weights[o];
        double v = w[w.size() - 1];
        for (std::size_t g = 0; g < genes[o].size(); ++g)
            v += w[static_cast<Eigen::Index>(g)] * genes[o][g].tree.eval(ywin, uwin);
        y[static_cast<Eigen::Index>(o)] = v;
    }
    return y;
}

namespace {

void grow(std::vector<Node>& out, int np, int ny, int nu, int depth, const TreeLimits& lim, Rng& rng)
{
    const int nterm = ny * np + nu * (np + 1);
    const bool leaf = depth <= 1 || rng.bernoulli(0.3);
    if (leaf) {
        Node n;
        if (rng.bernoulli(lim.const_probability)) {
            n.op = Op::Const;
            n.value = rng.uniform(-10.0, 10.0);
        } else {
            const int t = rng.below(nterm);
            if (t < ny * np) {
                n.op = Op::Y;
                n.index = t % ny;
                n.lag = t / ny + 1;
            } else {
                const int v = t - ny * np;
                n.op = Op::U;
                n.index = v % nu;
                n.lag = v / nu;
            }
        }
        out.push_back(n);
        return;
    }
    static constexpr Op funcs[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Cos, Op::Sin, Op::Sqrt};
    Node n;
    n.op = funcs[rng.below(7)];
    out.push_back(n);
    for (int i = 0; i < arity(n.op); ++i)
        grow(out, np, ny, nu, depth - 1, lim, rng);
}

} // namespace

Tree random_tree(int np, int ny, int nu, int depth, const TreeLimits& lim, Rng& rng)
{
    Tree t;
    for (int attempt = 0; attempt < 20; ++attempt) {
        t.nodes.clear();
        grow(t.nodes, np, ny, nu, std::min(depth, lim.max_depth), lim, rng);
        if (t.size() <= lim.max_nodes)
            return t;
    }
    t.nodes.resize(1);
    t.nodes[0] = Node{Op::U, 0, 0, 0.0};
    return t;
}

double fit_weights(Individual& ind, const Dataset& d)
{
    double sse = 0.0;
    ind.weights.resize(ind.genes.size());
    for (std::size_t o = 0; o < ind.genes.size(); ++o) {
        auto& gs = ind.genes[o];
        Mat X(d.rows(), static_cast<Eigen::Index>(gs.size()) + 1);
        for (std::size_t g = 0; g < gs.size(); ++g) {
            if (gs[g].cache.size() != d.rows())
                gs[g].cache = gs[g].tree.eval(d);
            X.col(static_cast<Eigen::Index>(g)) = gs[g].cache.matrix();
        }
        X.col(X.cols() - 1).setOnes();
        if (!X.allFinite() || X.cwiseAbs().maxCoeff() > 1e150) {
            ind.weights[o] = Vec::Zero(X.cols());
            ind.cost = std::numeric_limits<double>::infinity();
            return ind.cost;
        }
        const Vec t = d.target.col(static_cast<Eigen::Index>(o));
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(X);
        ind.weights[o] = cod.solve(t);
        sse += (X * ind.weights[o] - t).squaredNorm();
    }
    ind.cost = std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
    return ind.cost;
}

NarxModel to_narx(const Individual& ind, int np, int ny, int nu, const std::string& name)
{
    if (static_cast<int>(ind.genes.size()) != ny || ind.weights.size() != ind.genes.size())
        throw std::invalid_argument("to_narx: individual does not match the output dimension");
    NarxModel m;
    m.name = name;
    m.np = np;
    m.ny = ny;
    m.nu = nu;
    m.p = Vec::Zero(0);
    m.jacobian_mode = JacobianMode::FiniteDifference;
    m.linear = false;
    m.f = [ind](const Mat& yw, const Mat& uw, const Vec&) { return ind.eval(yw, uw); };
    return m;
}

std::string to_sexpr(const Individual& ind, int np, int ny, int nu)
{
    std::string out = "(narx (np " + std::to_string(np) + ") (ny " + std::to_string(ny) + ") (nu " +
                      std::to_string(nu) + ")";
    for (std::size_t o = 0; o < ind.genes.size(); ++o) {
        const Vec& w = ind.weights[o];
        out += "\n  (output " + num(w[w.size() - 1]);
        for (std::size_t g = 0; g < ind.genes[o].size(); ++g)
            out += "\n    (gene " + num(w[static_cast<Eigen::Index>(g)]) + " " + ind.genes[o][g].tree.to_sexpr() + ")";
        out += ")";
    }
    out += ")\n";
    return out;
}

namespace {

struct Lexer {
    std::vector<std::string> tokens;
    std::size_t pos = 0;

    explicit Lexer(const std::string& s)
    {
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        };
        for (char ch : s) {
            if (ch == '(' || ch == ')') {
                flush();
                tokens.emplace_back(1, ch);
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                flush();
            } else {
                cur += ch;
            }
        }
        flush();
    }
    const std::string& peek() const
    {
        if (pos >= tokens.size())
            throw std::invalid_argument("parse_sexpr: unexpected end of input");
        return tokens[pos];
    }
    std::string next()
    {
        const auto t = peek();
        ++pos;
        return t;
    }
    void expect(const std::string& t)
    {
        if (next() != t)
            throw std::invalid_argument("parse_sexpr: expected '" + t + "'");
    }
    double number()
    {
        const auto t = next();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("parse_sexpr: bad number '" + t + "'");
        }
        if (used != t.size())
            throw std::invalid_argument("parse_sexpr: bad number '" + t + "'");
        return v;
    }
    int integer()
    {
        const double v = number();
        if (v != std::floor(v))
            throw std::invalid_argument("parse_sexpr: expected an integer");
        return static_cast<int>(v);
    }
};

void parse_tree(Lexer& lx, std::vector<Node>& out, int np, int ny, int nu)
{
    if (lx.peek() != "(") {
        Node n;
        n.op = Op::Const;
        n.value = lx.number();
        out.push_back(n);
        return;
    }
    lx.expect("(");
    const auto name = lx.next();
    Node n;
    if (name == "y" || name == "u") {
        n.op = name == "y" ? Op::Y : Op::U;
        n.index = lx.integer() - 1;
        n.lag = lx.integer();
        const bool ok = name == "y" ? (n.index >= 0 && n.index < ny && n.lag >= 1 && n.lag <= np)
                                    : (n.index >= 0 && n.index < nu && n.lag >= 0 && n.lag <= np);
        if (!ok)
            throw std::invalid_argument("parse_sexpr: terminal out of range");
        out.push_back(n);
        lx.expect(")");
        return;
    }
    static const std::pair<const char*, Op> table[] = {{"add", Op::Add}, {"sub", Op::Sub}, {"mul", Op::Mul},
                                                       {"pdiv", Op::Div}, {"cos", Op::Cos}, {"sin", Op::Sin},
                                                       {"sqrtabs", Op::Sqrt}};
    bool found = false;
    for (const auto& [s, op] : table) {
        if (name == s) {
            n.op = op;
            found = true;
        }
    }
    if (!found)
        throw std::invalid_argument("parse_sexpr: unknown operator '" + name + "'");
    out.push_back(n);
    for (int i = 0; i < arity(n.op); ++i)
        parse_tree(lx, out, np, ny, nu);
    lx.expect(")");
}

int keyed_int(Lexer& lx, const char* key)
{
    lx.expect("(");
    lx.expect(key);
    const int v = lx.integer();
    lx.expect(")");
    return v;
}

} // namespace

ParsedIndividual parse_sexpr(const std::string& text)
{
    Lexer lx(text);
    ParsedIndividual p;
    lx.expect("(");
    lx.expect("narx");
    p.np = keyed_int(lx, "np");
    p.ny = keyed_int(lx, "ny");
    p.nu = keyed_int(lx, "nu");
    if (p.np < 1 || p.ny < 1 || p.nu < 0)
        throw std::invalid_argument("parse_sexpr: invalid dimensions");
    while (lx.peek() == "(") {
        lx.expect("(");
        lx.expect("output");
        const double bias = lx.number();
        std::vector<Gene> genes;
        std::vector<double> w;
        while (lx.peek() == "(") {
            lx.expect("(");
            lx.expect("gene");
            w.push_back(lx.number());
            Gene g;
            parse_tree(lx, g.tree.nodes, p.np, p.ny, p.nu);
            genes.push_back(std::move(g));
            lx.expect(")");
        }
        lx.expect(")");
        Vec wv(static_cast<Eigen::Index>(w.size()) + 1);
        for (std::size_t i = 0; i < w.size(); ++i)
            wv[static_cast<Eigen::Index>(i)] = w[i];
        wv[wv.size() - 1] = bias;
        p.ind.genes.push_back(std::move(genes));
        p.ind.weights.push_back(wv);
    }
    lx.expect(")");
    if (lx.pos != lx.tokens.size())
        throw std::invalid_argument("parse_sexpr: trailing input");
    if (static_cast<int>(p.ind.genes.size()) != p.ny)
        throw std::invalid_argument("parse_sexpr: output count does not match ny");
    return p;
}

} // namespace reachconf::gp
