#include "reachconf/lp.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace reachconf::optim {

void LinearProgram::validate() const
{
    const auto n = objective.size();
    if (ineq.cols() != n && ineq.rows() > 0)
        throw std::invalid_argument("LinearProgram: inequality column count mismatch");
    if (eq.cols() != n && eq.rows() > 0)
        throw std::invalid_argument("LinearProgram: equality column count mismatch");
    if (ineq_rhs.size() != ineq.rows() || eq_rhs.size() != eq.rows())
        throw std::invalid_argument("LinearProgram: right-hand side length mismatch");
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("LinearProgram: bound vector length mismatch");
    if (!objective.allFinite())
        throw std::invalid_argument("LinearProgram: objective must be finite");
    for (Eigen::Index j = 0; j < n; ++j) {
        if (lower[j] > upper[j])
            throw std::invalid_argument("LinearProgram: lower bound exceeds upper bound");
    }
}

int LpBuilder::add_var(double cost, double lower, double upper)
{
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return static_cast<int>(cost_.size()) - 1;
}

void LpBuilder::add_le(const std::vector<std::pair<int, double>>& terms, double rhs)
{
    const int row = static_cast<int>(ineq_rhs_.size());
    for (const auto& [j, a] : terms) {
        if (a != 0.0)
            ineq_.emplace_back(row, j, a);
    }
    ineq_rhs_.push_back(rhs);
}

void LpBuilder::add_ge(const std::vector<std::pair<int, double>>& terms, double rhs)
{
    std::vector<std::pair<int, double>> negated;
    negated.reserve(terms.size());
    for (const auto& [j, a] : terms)
        negated.emplace_back(j, -a);
    add_le(negated, -rhs);
}

void LpBuilder::add_eq(const std::vector<std::pair<int, double>>& terms, double rhs)
{
    const int row = static_cast<int>(eq_rhs_.size());
    for (const auto& [j, a] : terms) {
        if (a != 0.0)
            eq_.emplace_back(row, j, a);
    }
    eq_rhs_.push_back(rhs);
}

LinearProgram LpBuilder::build() const
{
    const auto n = static_cast<Eigen::Index>(cost_.size());
    LinearProgram lp;
    lp.objective = Eigen::Map<const Vec>(cost_.data(), n);
    lp.lower = Eigen::Map<const Vec>(lower_.data(), n);
    lp.upper = Eigen::Map<const Vec>(upper_.data(), n);
    lp.ineq.resize(static_cast<Eigen::Index>(ineq_rhs_.size()), n);
    lp.ineq.setFromTriplets(ineq_.begin(), ineq_.end());
    lp.ineq_rhs = Eigen::Map<const Vec>(ineq_rhs_.data(), static_cast<Eigen::Index>(ineq_rhs_.size()));
    lp.eq.resize(static_cast<Eigen::Index>(eq_rhs_.size()), n);
    lp.eq.setFromTriplets(eq_.begin(), eq_.end());
    lp.eq_rhs = Eigen::Map<const Vec>(eq_rhs_.data(), static_cast<Eigen::Index>(eq_rhs_.size()));
    return lp;
}

const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;

// Factorization of a basis B = [S | I_L] where I_L are the logical columns.
// Only the kernel K = S restricted to rows without a basic logical is
// factored; logical rows are eliminated by substitution. Updates are kept in
// product form.
class BasisFactor {
public:
    bool factor(const SparseMat& A, int n, const std::vector<int>& head)
    {
        const int m = static_cast<int>(A.rows());
        etas_.clear();
        struct_pos_.clear();
        struct_col_.clear();
        kernel_row_of_.assign(m, -1);
        logical_pos_of_row_.assign(m, -1);
        for (int p = 0; p < m; ++p) {
            const int v = head[p];
            if (v < n) {
                struct_pos_.push_back(p);
                struct_col_.push_back(v);
            } else {
                logical_pos_of_row_[v - n] = p;
            }
        }
        kernel_rows_.clear();
        for (int i = 0; i < m; ++i) {
            if (logical_pos_of_row_[i] < 0) {
                kernel_row_of_[i] = static_cast<int>(kernel_rows_.size());
                kernel_rows_.push_back(i);
            }
        }
        const int k = static_cast<int>(struct_pos_.size());
        if (static_cast<int>(kernel_rows_.size()) != k)
            return false;
        A_ = &A;
        m_ = m;
        dense_lu_.reset();
        sparse_lu_.reset();
        if (k == 0)
            return true;

        if (k <= kDenseKernel) {
            Mat K = Mat::Zero(k, k);
            for (int c = 0; c < k; ++c) {
                for (SparseMat::InnerIterator it(A, struct_col_[c]); it; ++it) {
                    const int r = kernel_row_of_[it.row()];
                    if (r >= 0)
                        K(r, c) = it.value();
                }
            }
            dense_lu_ = std::make_unique<Eigen::PartialPivLU<Mat>>(K);
            const auto& lu = dense_lu_->matrixLU();
            double dmax = 0.0;
            double dmin = kInf;
            for (int i = 0; i < k; ++i) {
                dmax = std::max(dmax, std::abs(lu(i, i)));
                dmin = std::min(dmin, std::abs(lu(i, i)));
            }
            return dmax > 0.0 && dmin > 1e-13 * dmax;
        }

        std::vector<Eigen::Triplet<double>> trips;
        for (int c = 0; c < k; ++c) {
            for (SparseMat::InnerIterator it(A, struct_col_[c]); it; ++it) {
                const int r = kernel_row_of_[it.row()];
                if (r >= 0)
                    trips.emplace_back(r, c, it.value());
            }
        }
        SparseMat K(k, k);
        K.setFromTriplets(trips.begin(), trips.end());
        K.makeCompressed();
        sparse_lu_ = std::make_unique<Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>>>();
        sparse_lu_->compute(K);
        return sparse_lu_->info() == Eigen::Success;
    }

    // Solve B x = v; v is indexed by row, the result by basis position.
    Vec ftran(const Vec& v) const
    {
        Vec x(m_);
        const int k = static_cast<int>(struct_pos_.size());
        Vec xk;
        if (k > 0) {
            Vec rhs(k);
            for (int r = 0; r < k; ++r)
                rhs[r] = v[kernel_rows_[r]];
            xk = dense_lu_ ? Vec(dense_lu_->solve(rhs)) : Vec(sparse_lu_->solve(rhs));
        }
        for (int i = 0; i < m_; ++i) {
            const int p = logical_pos_of_row_[i];
            if (p >= 0)
                x[p] = v[i];
        }
        for (int c = 0; c < k; ++c) {
            const double xc = xk[c];
            x[struct_pos_[c]] = xc;
            if (xc == 0.0)
                continue;
            for (SparseMat::InnerIterator it(*A_, struct_col_[c]); it; ++it) {
                const int p = logical_pos_of_row_[it.row()];
                if (p >= 0)
                    x[p] -= it.value() * xc;
            }
        }
        for (const auto& eta : etas_) {
            const double t = x[eta.pos] / eta.pivot;
            if (t != 0.0) {
                for (std::size_t q = 0; q < eta.idx.size(); ++q)
                    x[eta.idx[q]] -= eta.val[q] * t;
            }
            x[eta.pos] = t;
        }
        return x;
    }

    // Solve B^T y = c; c is indexed by basis position, the result by row.
    Vec btran(Vec c) const
    {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = c[it->pos];
            for (std::size_t q = 0; q < it->idx.size(); ++q)
                s -= it->val[q] * c[it->idx[q]];
            c[it->pos] = s / it->pivot;
        }
        Vec y = Vec::Zero(m_);
        for (int i = 0; i < m_; ++i) {
            const int p = logical_pos_of_row_[i];
            if (p >= 0)
                y[i] = c[p];
        }
        const int k = static_cast<int>(struct_pos_.size());
        if (k > 0) {
            Vec rhs(k);
            for (int col = 0; col < k; ++col) {
                double s = c[struct_pos_[col]];
                for (SparseMat::InnerIterator it(*A_, struct_col_[col]); it; ++it) {
                    if (logical_pos_of_row_[it.row()] >= 0)
                        s -= it.value() * y[it.row()];
                }
                rhs[col] = s;
            }
            Vec z = dense_lu_ ? Vec(dense_lu_->transpose().solve(rhs))
                              : Vec(sparse_lu_->transpose().solve(rhs));
            for (int r = 0; r < k; ++r)
                y[kernel_rows_[r]] = z[r];
        }
        return y;
    }

    void push_eta(int pos, const Vec& w)
    {
        Eta eta;
        eta.pos = pos;
        eta.pivot = w[pos];
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (i != pos && std::abs(w[i]) > kDropTol) {
                eta.idx.push_back(static_cast<int>(i));
                eta.val.push_back(w[i]);
            }
        }
        etas_.push_back(std::move(eta));
    }

    int num_etas() const { return static_cast<int>(etas_.size()); }

private:
    static constexpr int kDenseKernel = 300;

    struct Eta {
        int pos = 0;
        double pivot = 1.0;
        std::vector<int> idx;
        std::vector<double> val;
    };

    const SparseMat* A_ = nullptr;
    int m_ = 0;
    std::vector<int> struct_pos_, struct_col_;
    std::vector<int> kernel_rows_, kernel_row_of_, logical_pos_of_row_;
    std::unique_ptr<Eigen::PartialPivLU<Mat>> dense_lu_;
    std::unique_ptr<Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>>> sparse_lu_;
    std::vector<Eta> etas_;
};

enum class NonbasicAt : unsigned char { Lower, Upper, Zero };

class Simplex {
public:
    Simplex(const LinearProgram& lp, const LpOptions& opt) : opt_(opt)
    {
        n_ = static_cast<int>(lp.num_vars());
        const int mi = static_cast<int>(lp.ineq.rows());
        const int me = static_cast<int>(lp.eq.rows());
        m_ = mi + me;

        // Stack inequality and equality rows.
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(lp.ineq.nonZeros() + lp.eq.nonZeros()));
        for (int j = 0; j < lp.ineq.outerSize(); ++j)
            for (SparseMat::InnerIterator it(lp.ineq, j); it; ++it)
                trips.emplace_back(static_cast<int>(it.row()), j, it.value());
        for (int j = 0; j < lp.eq.outerSize(); ++j)
            for (SparseMat::InnerIterator it(lp.eq, j); it; ++it)
                trips.emplace_back(mi + static_cast<int>(it.row()), j, it.value());
        A_.resize(m_, n_);
        A_.setFromTriplets(trips.begin(), trips.end());
        A_.makeCompressed();

        b_.resize(m_);
        if (mi > 0)
            b_.head(mi) = lp.ineq_rhs;
        if (me > 0)
            b_.tail(me) = lp.eq_rhs;

        row_scale_ = Vec::Ones(m_);
        col_scale_ = Vec::Ones(n_);
        if (opt_.scale)
            compute_scaling();

        const int N = n_ + m_;
        cost_ = Vec::Zero(N);
        lo_.resize(N);
        hi_.resize(N);
        for (int j = 0; j < n_; ++j) {
            cost_[j] = lp.objective[j] * col_scale_[j];
            lo_[j] = lp.lower[j] / col_scale_[j];
            hi_[j] = lp.upper[j] / col_scale_[j];
        }
        for (int i = 0; i < m_; ++i) {
            lo_[n_ + i] = 0.0;
            hi_[n_ + i] = (i < mi) ? kInf : 0.0;
        }
        orig_ = &lp;
    }

    LpResult run()
    {
        LpResult res;
        const int N = n_ + m_;
        max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : std::max(20000, 50 * (N + m_));

        // Slack basis; nonbasic structurals at the bound favoured by their cost.
        head_.resize(m_);
        pos_.assign(N, -1);
        at_.assign(N, NonbasicAt::Lower);
        x_ = Vec::Zero(N);
        for (int i = 0; i < m_; ++i) {
            head_[i] = n_ + i;
            pos_[n_ + i] = i;
        }
        bool dual_feasible = true;
        for (int j = 0; j < n_; ++j) {
            const bool lo_fin = std::isfinite(lo_[j]);
            const bool hi_fin = std::isfinite(hi_[j]);
            if (lo_fin && hi_fin) {
                place_at(j, cost_[j] < 0.0 ? NonbasicAt::Upper : NonbasicAt::Lower);
            } else if (lo_fin) {
                place_at(j, NonbasicAt::Lower);
                dual_feasible &= cost_[j] >= -opt_.optimality_tol;
            } else if (hi_fin) {
                place_at(j, NonbasicAt::Upper);
                dual_feasible &= cost_[j] <= opt_.optimality_tol;
            } else {
                place_at(j, NonbasicAt::Zero);
                dual_feasible &= std::abs(cost_[j]) <= opt_.optimality_tol;
            }
        }

        if (!refactor()) {
            res.status = LpStatus::NumericalFailure;
            res.diagnostics = "initial factorization failed";
            return res;
        }

        bool use_dual = opt_.algorithm == LpAlgorithm::Dual ||
                        (opt_.algorithm == LpAlgorithm::Auto && dual_feasible);
        LpStatus status;
        if (use_dual && dual_feasible) {
            status = dual_simplex();
            if (lost_dual_feasibility_)
                status = primal_simplex();
        } else {
            status = primal_simplex();
        }

        res.status = status;
        res.iterations = iterations_;
        res.bland_iterations = bland_iterations_;
        std::ostringstream diag;
        diag << "rows=" << m_ << " cols=" << n_ << " iters=" << iterations_
             << " bland=" << bland_iterations_ << (used_dual_ ? " dual" : " primal");
        res.diagnostics = diag.str();
        if (status == LpStatus::Optimal) {
            res.x.resize(n_);
            for (int j = 0; j < n_; ++j) {
                double v = x_[j] * col_scale_[j];
                // Snap to the original bounds to absorb round-off.
                v = std::clamp(v, orig_->lower[j], orig_->upper[j]);
                res.x[j] = v;
            }
            res.objective = orig_->objective.dot(res.x);
        }
        return res;
    }

private:
    void compute_scaling()
    {
        // Power-of-two max-norm equilibration, rows then columns.
        Vec rmax = Vec::Zero(m_);
        for (int j = 0; j < n_; ++j)
            for (SparseMat::InnerIterator it(A_, j); it; ++it)
                rmax[it.row()] = std::max(rmax[it.row()], std::abs(it.value()));
        for (int i = 0; i < m_; ++i)
            row_scale_[i] = rmax[i] > 0.0 ? std::exp2(-std::round(std::log2(rmax[i]))) : 1.0;
        for (int j = 0; j < n_; ++j) {
            double cmax = 0.0;
            for (SparseMat::InnerIterator it(A_, j); it; ++it)
                cmax = std::max(cmax, std::abs(it.value() * row_scale_[it.row()]));
            col_scale_[j] = cmax > 0.0 ? std::exp2(-std::round(std::log2(cmax))) : 1.0;
        }
        for (int j = 0; j < n_; ++j)
            for (SparseMat::InnerIterator it(A_, j); it; ++it)
                it.valueRef() *= row_scale_[it.row()] * col_scale_[j];
        for (int i = 0; i < m_; ++i)
            b_[i] *= row_scale_[i];
    }

    void place_at(int j, NonbasicAt where)
    {
        at_[j] = where;
        switch (where) {
        case NonbasicAt::Lower: x_[j] = lo_[j]; break;
        case NonbasicAt::Upper: x_[j] = hi_[j]; break;
        case NonbasicAt::Zero: x_[j] = 0.0; break;
        }
    }

    bool is_boxed(int j) const { return std::isfinite(lo_[j]) && std::isfinite(hi_[j]); }

    // Column j of [A | I] dotted with a row-indexed vector.
    double col_dot(int j, const Vec& y) const
    {
        if (j >= n_)
            return y[j - n_];
        double s = 0.0;
        for (SparseMat::InnerIterator it(A_, j); it; ++it)
            s += it.value() * y[it.row()];
        return s;
    }

    Vec column(int j) const
    {
        Vec a = Vec::Zero(m_);
        if (j >= n_) {
            a[j - n_] = 1.0;
        } else {
            for (SparseMat::InnerIterator it(A_, j); it; ++it)
                a[it.row()] = it.value();
        }
        return a;
    }

    bool refactor()
    {
        if (!factor_.factor(A_, n_, head_))
            return false;
        recompute_basics();
        return true;
    }

    void recompute_basics()
    {
        Vec r = b_;
        for (int j = 0; j < n_ + m_; ++j) {
            if (pos_[j] >= 0 || x_[j] == 0.0)
                continue;
            if (j >= n_) {
                r[j - n_] -= x_[j];
            } else {
                for (SparseMat::InnerIterator it(A_, j); it; ++it)
                    r[it.row()] -= it.value() * x_[j];
            }
        }
        const Vec xb = factor_.ftran(r);
        for (int p = 0; p < m_; ++p)
            x_[head_[p]] = xb[p];
    }

    double infeasibility(int j) const
    {
        if (x_[j] < lo_[j] - opt_.feasibility_tol)
            return lo_[j] - x_[j];
        if (x_[j] > hi_[j] + opt_.feasibility_tol)
            return x_[j] - hi_[j];
        return 0.0;
    }

    Vec reduced_costs(const Vec& phase_cost) const
    {
        Vec cb(m_);
        for (int p = 0; p < m_; ++p)
            cb[p] = phase_cost[head_[p]];
        const Vec y = factor_.btran(cb);
        Vec d = Vec::Zero(n_ + m_);
        for (int j = 0; j < n_ + m_; ++j) {
            if (pos_[j] < 0)
                d[j] = phase_cost[j] - col_dot(j, y);
        }
        return d;
    }

    void pivot(int leave_pos, int enter, const Vec& w)
    {
        const int leaving = head_[leave_pos];
        pos_[leaving] = -1;
        head_[leave_pos] = enter;
        pos_[enter] = leave_pos;
        factor_.push_eta(leave_pos, w);
    }

    bool maybe_refactor()
    {
        if (factor_.num_etas() >= opt_.refactor_interval)
            return refactor();
        return true;
    }

    void tick()
    {
        ++iterations_;
        if ((iterations_ & 63) == 0)
            opt_.deadline.check("solve_lp");
    }

    // ---- dual simplex --------------------------------------------------

    LpStatus dual_simplex()
    {
        used_dual_ = true;
        int degenerate_run = 0;
        int verify_rounds = 0;
        while (true) {
            if (iterations_ >= max_iter_)
                return LpStatus::IterationLimit;
            if (!maybe_refactor())
                return LpStatus::NumericalFailure;

            Vec d = reduced_costs(cost_);

            // Keep boxed nonbasics dual feasible by flipping bounds; detect loss
            // of dual feasibility elsewhere.
            bool flipped = false;
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0)
                    continue;
                const double dj = d[j];
                if (is_boxed(j)) {
                    if (lo_[j] == hi_[j])
                        continue;
                    if (at_[j] == NonbasicAt::Lower && dj < -opt_.optimality_tol) {
                        place_at(j, NonbasicAt::Upper);
                        flipped = true;
                    } else if (at_[j] == NonbasicAt::Upper && dj > opt_.optimality_tol) {
                        place_at(j, NonbasicAt::Lower);
                        flipped = true;
                    }
                } else if ((at_[j] == NonbasicAt::Lower && dj < -1e3 * opt_.optimality_tol) ||
                           (at_[j] == NonbasicAt::Upper && dj > 1e3 * opt_.optimality_tol) ||
                           (at_[j] == NonbasicAt::Zero && std::abs(dj) > 1e3 * opt_.optimality_tol)) {
                    lost_dual_feasibility_ = true;
                    return LpStatus::NumericalFailure;
                }
            }
            if (flipped)
                recompute_basics();

            const bool bland = opt_.bland_only || degenerate_run >= opt_.degenerate_switch;

            // Leaving row.
            int r = -1;
            double best = 0.0;
            for (int p = 0; p < m_; ++p) {
                const int v = head_[p];
                const double inf = infeasibility(v);
                if (inf <= 0.0)
                    continue;
                if (bland) {
                    if (r < 0 || v < head_[r])
                        r = p;
                } else if (inf > best) {
                    best = inf;
                    r = p;
                }
            }
            if (r < 0) {
                // Primal feasible and dual feasible. Verify on a fresh factor.
                if (factor_.num_etas() > 0 && verify_rounds < 3) {
                    ++verify_rounds;
                    if (!refactor())
                        return LpStatus::NumericalFailure;
                    continue;
                }
                return LpStatus::Optimal;
            }
            const int leaving = head_[r];
            const bool increase = x_[leaving] < lo_[leaving];
            const double target = increase ? lo_[leaving] : hi_[leaving];

            Vec er = Vec::Zero(m_);
            er[r] = 1.0;
            const Vec rho = factor_.btran(er);

            // Ratio test (Harris two-pass).
            struct Cand {
                int j;
                double alpha;
                double ratio;
            };
            std::vector<Cand> cands;
            double theta_max = kInf;
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0 || lo_[j] == hi_[j])
                    continue;
                const double a = col_dot(j, rho);
                if (std::abs(a) <= kPivotTol)
                    continue;
                const double s = increase ? a : -a;
                bool eligible = false;
                if (at_[j] == NonbasicAt::Zero)
                    eligible = true;
                else if (at_[j] == NonbasicAt::Lower)
                    eligible = s < 0.0;
                else
                    eligible = s > 0.0;
                if (!eligible)
                    continue;
                const double dj = std::abs(d[j]);
                const double ratio = dj / std::abs(a);
                cands.push_back({j, a, ratio});
                theta_max = std::min(theta_max, (dj + opt_.optimality_tol) / std::abs(a));
            }
            if (cands.empty())
                return LpStatus::Infeasible;

            int q = -1;
            double q_alpha = 0.0;
            double q_ratio = kInf;
            if (bland) {
                double min_ratio = kInf;
                for (const auto& c : cands)
                    min_ratio = std::min(min_ratio, c.ratio);
                for (const auto& c : cands) {
                    if (c.ratio <= min_ratio + 1e-12 && (q < 0 || c.j < q)) {
                        q = c.j;
                        q_alpha = c.alpha;
                        q_ratio = c.ratio;
                    }
                }
                ++bland_iterations_;
            } else {
                for (const auto& c : cands) {
                    if (c.ratio <= theta_max && std::abs(c.alpha) > std::abs(q_alpha)) {
                        q = c.j;
                        q_alpha = c.alpha;
                        q_ratio = c.ratio;
                    }
                }
            }

            const Vec w = factor_.ftran(column(q));
            if (std::abs(w[r]) <= kPivotTol ||
                std::abs(w[r] - q_alpha) > 1e-6 * (1.0 + std::abs(q_alpha))) {
                // Inaccurate update: refactor and retry the iteration.
                if (factor_.num_etas() == 0)
                    return LpStatus::NumericalFailure;
                if (!refactor())
                    return LpStatus::NumericalFailure;
                continue;
            }

            const double delta = (x_[leaving] - target) / w[r];
            for (int p = 0; p < m_; ++p)
                x_[head_[p]] -= delta * w[p];
            x_[q] += delta;
            x_[leaving] = target;
            at_[leaving] = increase ? NonbasicAt::Lower : NonbasicAt::Upper;
            if (lo_[leaving] == hi_[leaving])
                at_[leaving] = NonbasicAt::Lower;
            pivot(r, q, w);

            degenerate_run = (q_ratio <= 1e-12) ? degenerate_run + 1 : 0;
            tick();
        }
    }

    // ---- primal simplex ---------------------------------------------------

    LpStatus primal_simplex()
    {
        int degenerate_run = 0;
        int verify_rounds = 0;
        Vec phase_cost(n_ + m_);
        while (true) {
            if (iterations_ >= max_iter_)
                return LpStatus::IterationLimit;
            if (!maybe_refactor())
                return LpStatus::NumericalFailure;

            bool phase1 = false;
            phase_cost.setZero();
            for (int p = 0; p < m_; ++p) {
                const int v = head_[p];
                if (x_[v] < lo_[v] - opt_.feasibility_tol) {
                    phase_cost[v] = -1.0;
                    phase1 = true;
                } else if (x_[v] > hi_[v] + opt_.feasibility_tol) {
                    phase_cost[v] = 1.0;
                    phase1 = true;
                }
            }
            if (!phase1)
                phase_cost = cost_;

            const Vec d = reduced_costs(phase_cost);
            const bool bland = opt_.bland_only || degenerate_run >= opt_.degenerate_switch;

            int q = -1;
            double best = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                if (pos_[j] >= 0 || lo_[j] == hi_[j])
                    continue;
                const double dj = d[j];
                bool eligible = false;
                if (at_[j] == NonbasicAt::Zero)
                    eligible = std::abs(dj) > opt_.optimality_tol;
                else if (at_[j] == NonbasicAt::Lower)
                    eligible = dj < -opt_.optimality_tol;
                else
                    eligible = dj > opt_.optimality_tol;
                if (!eligible)
                    continue;
                if (bland) {
                    q = j;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    q = j;
                }
            }
            if (q < 0) {
                if (factor_.num_etas() > 0 && verify_rounds < 3) {
                    ++verify_rounds;
                    if (!refactor())
                        return LpStatus::NumericalFailure;
                    continue;
                }
                return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
            }
            if (bland)
                ++bland_iterations_;

            const double sigma = (at_[q] == NonbasicAt::Upper || (at_[q] == NonbasicAt::Zero && d[q] > 0.0))
                                     ? -1.0
                                     : 1.0;
            const Vec w = factor_.ftran(column(q));

            // Harris ratio test. A phase-1 infeasible basic blocks only where
            // it becomes feasible.
            auto limit = [&](int p, double tol, double& out_bound) -> double {
                const int v = head_[p];
                const double rate = -sigma * w[p];
                if (std::abs(rate) <= kPivotTol)
                    return kInf;
                const double xv = x_[v];
                if (rate < 0.0) {
                    if (xv > hi_[v] + opt_.feasibility_tol) {
                        out_bound = hi_[v];
                        return (xv - hi_[v] + tol) / -rate;
                    }
                    if (xv >= lo_[v] - opt_.feasibility_tol && std::isfinite(lo_[v])) {
                        out_bound = lo_[v];
                        return std::max(0.0, xv - lo_[v] + tol) / -rate;
                    }
                    return kInf;
                }
                if (xv < lo_[v] - opt_.feasibility_tol) {
                    out_bound = lo_[v];
                    return (lo_[v] - xv + tol) / rate;
                }
                if (xv <= hi_[v] + opt_.feasibility_tol && std::isfinite(hi_[v])) {
                    out_bound = hi_[v];
                    return std::max(0.0, hi_[v] - xv + tol) / rate;
                }
                return kInf;
            };

            double t_max = kInf;
            double bound_dummy = 0.0;
            for (int p = 0; p < m_; ++p)
                t_max = std::min(t_max, limit(p, bland ? 0.0 : opt_.feasibility_tol, bound_dummy));
            const double flip = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInf;

            int r = -1;
            double r_bound = 0.0;
            double step = kInf;
            if (std::isfinite(t_max)) {
                double best_rate = 0.0;
                for (int p = 0; p < m_; ++p) {
                    double bnd = 0.0;
                    const double exact = limit(p, 0.0, bnd);
                    if (!std::isfinite(exact) || exact > t_max)
                        continue;
                    const double rate = std::abs(w[p]);
                    const bool better = bland ? (r < 0 || head_[p] < head_[r]) : rate > best_rate;
                    if (better) {
                        best_rate = rate;
                        r = p;
                        r_bound = bnd;
                        step = exact;
                    }
                }
            }
            if (std::isfinite(flip) && flip <= step) {
                // Bound flip of the entering variable, no basis change.
                for (int p = 0; p < m_; ++p)
                    x_[head_[p]] -= sigma * flip * w[p];
                place_at(q, at_[q] == NonbasicAt::Lower ? NonbasicAt::Upper : NonbasicAt::Lower);
                degenerate_run = 0;
                tick();
                continue;
            }
            if (r < 0)
                return phase1 ? LpStatus::NumericalFailure : LpStatus::Unbounded;

            const int leaving = head_[r];
            for (int p = 0; p < m_; ++p)
                x_[head_[p]] -= sigma * step * w[p];
            x_[q] += sigma * step;
            x_[leaving] = r_bound;
            at_[leaving] = (r_bound == lo_[leaving]) ? NonbasicAt::Lower : NonbasicAt::Upper;
            pivot(r, q, w);

            degenerate_run = (step <= 1e-12) ? degenerate_run + 1 : 0;
            tick();
        }
    }

    LpOptions opt_;
    const LinearProgram* orig_ = nullptr;
    int n_ = 0;
    int m_ = 0;
    int max_iter_ = 0;
    SparseMat A_;
    Vec b_, row_scale_, col_scale_;
    Vec cost_, lo_, hi_, x_;
    std::vector<int> head_, pos_;
    std::vector<NonbasicAt> at_;
    BasisFactor factor_;
    int iterations_ = 0;
    int bland_iterations_ = 0;
    bool used_dual_ = false;
    bool lost_dual_feasibility_ = false;
};

} // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options)
{
    lp.validate();
    Simplex simplex(lp, options);
    return simplex.run();
}

} // namespace reachconf::optim
