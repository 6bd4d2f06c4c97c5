#include "reachconf/models.hpp"

#include <cmath>

namespace reachconf {

bool is_narx(const Model& m) { return std::holds_alternative<NarxModel>(m); }

bool is_linear(const Model& m)
{
    return std::visit([](const auto& x) { return x.linear; }, m);
}

int num_inputs(const Model& m)
{
    return std::visit([](const auto& x) { return x.nu; }, m);
}

int num_outputs(const Model& m)
{
    return std::visit([](const auto& x) { return x.ny; }, m);
}

int model_order(const Model& m)
{
    return is_narx(m) ? std::get<NarxModel>(m).np : 0;
}

const Vec& params(const Model& m)
{
    return std::visit([](const auto& x) -> const Vec& { return x.p; }, m);
}

const std::string& model_name(const Model& m)
{
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, m);
}

Model with_params(const Model& m, const Vec& p)
{
    return std::visit(
        [&](const auto& x) -> Model {
            if (p.size() != x.p.size())
                throw std::invalid_argument("with_params: parameter length mismatch");
            auto copy = x;
            copy.p = p;
            return copy;
        },
        m);
}

void TestSuite::validate(int ny) const
{
    for (const auto& c : cases) {
        for (const auto& s : c.samples) {
            if (s.rows() != ny || s.cols() != c.num_steps())
                throw std::invalid_argument("TestSuite: sample trajectory shape mismatch");
        }
    }
}

UncertaintySpec UncertaintySpec::identity(int nx, int nu)
{
    UncertaintySpec s;
    s.c_x = Vec::Zero(nx);
    s.c_u = Vec::Zero(nu);
    s.G_x = Mat::Identity(nx, nx);
    s.G_u = Mat::Identity(nu, nu);
    s.alpha_x = Vec::Ones(nx);
    s.alpha_u = Vec::Ones(nu);
    s.cdelta_x = Vec::Zero(nx);
    s.cdelta_u = Vec::Zero(nu);
    return s;
}

void UncertaintySpec::validate() const
{
    if (G_x.rows() != c_x.size() || G_u.rows() != c_u.size())
        throw std::invalid_argument("UncertaintySpec: template rows must match center length");
    if (alpha_x.size() != G_x.cols() || alpha_u.size() != G_u.cols())
        throw std::invalid_argument("UncertaintySpec: alpha length must match template columns");
    if (cdelta_x.size() != c_x.size() || cdelta_u.size() != c_u.size())
        throw std::invalid_argument("UncertaintySpec: center shift length mismatch");
    if ((alpha_x.array() < 0.0).any() || (alpha_u.array() < 0.0).any())
        throw std::invalid_argument("UncertaintySpec: alpha must be nonnegative");
}

Vec UncertaintySpec::alpha() const
{
    Vec a(alpha_x.size() + alpha_u.size());
    a << alpha_x, alpha_u;
    return a;
}

void UncertaintySpec::set_alpha(const Vec& a)
{
    if (a.size() != eta_x() + eta_u())
        throw std::invalid_argument("UncertaintySpec::set_alpha: length mismatch");
    alpha_x = a.head(eta_x());
    alpha_u = a.tail(eta_u());
}

Vec UncertaintySpec::cdelta() const
{
    Vec c(cdelta_x.size() + cdelta_u.size());
    c << cdelta_x, cdelta_u;
    return c;
}

void UncertaintySpec::set_cdelta(const Vec& c)
{
    if (c.size() != c_x.size() + c_u.size())
        throw std::invalid_argument("UncertaintySpec::set_cdelta: length mismatch");
    cdelta_x = c.head(c_x.size());
    cdelta_u = c.tail(c_u.size());
}

StateSpaceModel discretize_euler(const ContinuousDynamics& dyn, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("discretize_euler: dt must be positive");
    StateSpaceModel m;
    m.nx = dyn.nx;
    m.nu = dyn.nu;
    m.dt = dt;
    auto h = dyn.h;
    m.f = [h, dt](const Vec& x, const Vec& u, const Vec& p) -> Vec { return x + dt * h(x, u, p); };
    if (dyn.jac_h) {
        auto jh = dyn.jac_h;
        m.jac_f = [jh, dt](const Vec& x, const Vec& u, const Vec& p, Mat& dx, Mat& du) {
            jh(x, u, p, dx, du);
            dx *= dt;
            dx.diagonal().array() += 1.0;
            du *= dt;
        };
        m.jacobian_mode = JacobianMode::Analytic;
    }
    if (dyn.hess_h) {
        auto hh = dyn.hess_h;
        m.hess_f = [hh, dt](const Vec& lo, const Vec& hi, const Vec& p) {
            auto H = hh(lo, hi, p);
            for (auto& M : H)
                M *= dt;
            return H;
        };
    }
    return m;
}

namespace {

void check_finite(const Vec& v, const char* where, int k)
{
    if (!v.allFinite())
        throw SimulationDivergedError(std::string(where) + ": non-finite value at step " + std::to_string(k));
}

} // namespace

Mat simulate(const StateSpaceModel& m, const Vec& x0, const Mat& u)
{
    if (x0.size() != m.nx || u.rows() != m.nu)
        throw std::invalid_argument("simulate: dimension mismatch");
    const auto nk = u.cols();
    Mat y(m.ny, nk);
    Vec x = x0;
    for (Eigen::Index k = 0; k < nk; ++k) {
        const Vec uk = u.col(k);
        const Vec yk = m.g(x, uk, m.p);
        check_finite(yk, "simulate", static_cast<int>(k));
        y.col(k) = yk;
        if (k + 1 < nk) {
            x = m.f(x, uk, m.p);
            check_finite(x, "simulate", static_cast<int>(k));
        }
    }
    return y;
}

Mat simulate(const NarxModel& m, const Mat& initial, const Mat& u)
{
    if (initial.rows() != m.ny || initial.cols() != m.np || u.rows() != m.nu)
        throw std::invalid_argument("simulate: dimension mismatch");
    const auto nk = u.cols();
    if (nk < m.np)
        throw std::invalid_argument("simulate: horizon shorter than the model order");
    Mat y(m.ny, nk);
    y.leftCols(m.np) = initial;
    for (Eigen::Index k = m.np; k < nk; ++k) {
        const Vec yk = m.f(y.middleCols(k - m.np, m.np), u.middleCols(k - m.np, m.np + 1), m.p);
        check_finite(yk, "simulate", static_cast<int>(k));
        y.col(k) = yk;
    }
    return y;
}

Mat finite_difference(const std::function<Vec(const Vec&)>& h, const Vec& z)
{
    const Vec h0 = h(z);
    Mat J(h0.size(), z.size());
    Vec zp = z;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double step = 1e-6 * (1.0 + std::abs(z[i]));
        zp[i] = z[i] + step;
        const Vec hp = h(zp);
        zp[i] = z[i] - step;
        const Vec hm = h(zp);
        zp[i] = z[i];
        J.col(i) = (hp - hm) / (2.0 * step);
    }
    if (!J.allFinite())
        throw DifferentiationError("finite_difference: non-finite derivative");
    return J;
}

namespace {

SsJacobians ss_finite_difference(const StateSpaceModel& m, const Vec& x, const Vec& u)
{
    const int nx = m.nx;
    const int nu = m.nu;
    Vec z(nx + nu);
    z << x, u;
    auto fz = [&](const Vec& v) { return m.f(v.head(nx), v.tail(nu), m.p); };
    auto gz = [&](const Vec& v) { return m.g(v.head(nx), v.tail(nu), m.p); };
    const Mat Jf = finite_difference(fz, z);
    const Mat Jg = finite_difference(gz, z);
    return {Jf.leftCols(nx), Jf.rightCols(nu), Jg.leftCols(nx), Jg.rightCols(nu)};
}

Vec narx_stack(const Mat& ywin, const Mat& uwin)
{
    Vec z(ywin.size() + uwin.size());
    z << Eigen::Map<const Vec>(ywin.data(), ywin.size()), Eigen::Map<const Vec>(uwin.data(), uwin.size());
    return z;
}

NarxJacobians narx_finite_difference(const NarxModel& m, const Mat& ywin, const Mat& uwin)
{
    const auto ny = ywin.rows();
    const auto nu = uwin.rows();
    const Vec z = narx_stack(ywin, uwin);
    auto fz = [&](const Vec& v) {
        const Mat yw = Eigen::Map<const Mat>(v.data(), ny, m.np);
        const Mat uw = Eigen::Map<const Mat>(v.data() + ny * m.np, nu, m.np + 1);
        return m.f(yw, uw, m.p);
    };
    const Mat J = finite_difference(fz, z);
    NarxJacobians out;
    // Column block j of the y-part belongs to y_{k-n_p+j}, i.e. lag n_p - j.
    for (int i = 1; i <= m.np; ++i)
        out.A.push_back(J.middleCols((m.np - i) * ny, ny));
    const auto off = ny * m.np;
    for (int i = 0; i <= m.np; ++i)
        out.B.push_back(J.middleCols(off + (m.np - i) * nu, nu));
    return out;
}

} // namespace

SsJacobians jacobians_ss(const StateSpaceModel& m, const Vec& x, const Vec& u)
{
    if (x.size() != m.nx || u.size() != m.nu)
        throw std::invalid_argument("jacobians_ss: dimension mismatch");
    SsJacobians J;
    if (m.jacobian_mode == JacobianMode::Analytic && m.jac_f && m.jac_g) {
        m.jac_f(x, u, m.p, J.A, J.B);
        m.jac_g(x, u, m.p, J.C, J.D);
    } else if (m.jacobian_mode == JacobianMode::Analytic && (m.jac_f || m.jac_g)) {
        J = ss_finite_difference(m, x, u);
        if (m.jac_f)
            m.jac_f(x, u, m.p, J.A, J.B);
        if (m.jac_g)
            m.jac_g(x, u, m.p, J.C, J.D);
    } else {
        J = ss_finite_difference(m, x, u);
    }
    if (!J.A.allFinite() || !J.B.allFinite() || !J.C.allFinite() || !J.D.allFinite())
        throw DifferentiationError("jacobians_ss: non-finite derivative");
    return J;
}

NarxJacobians jacobians_narx(const NarxModel& m, const Mat& ywin, const Mat& uwin)
{
    if (ywin.rows() != m.ny || ywin.cols() != m.np || uwin.rows() != m.nu || uwin.cols() != m.np + 1)
        throw std::invalid_argument("jacobians_narx: window shape mismatch");
    NarxJacobians J;
    if (m.jacobian_mode == JacobianMode::Analytic && m.jac)
        m.jac(ywin, uwin, m.p, J.A, J.B);
    else
        J = narx_finite_difference(m, ywin, uwin);
    for (const auto& a : J.A)
        if (!a.allFinite())
            throw DifferentiationError("jacobians_narx: non-finite derivative");
    for (const auto& b : J.B)
        if (!b.allFinite())
            throw DifferentiationError("jacobians_narx: non-finite derivative");
    return J;
}

namespace {

double rel_err(const Mat& a, const Mat& b)
{
    if (a.size() == 0)
        return 0.0;
    return ((a - b).cwiseAbs().array() / (1.0 + b.cwiseAbs().array())).maxCoeff();
}

} // namespace

double jacobian_mismatch(const StateSpaceModel& m, const Vec& x, const Vec& u)
{
    if (!m.jac_f && !m.jac_g)
        return 0.0;
    const auto fd = ss_finite_difference(m, x, u);
    double err = 0.0;
    if (m.jac_f) {
        Mat A, B;
        m.jac_f(x, u, m.p, A, B);
        err = std::max({err, rel_err(A, fd.A), rel_err(B, fd.B)});
    }
    if (m.jac_g) {
        Mat C, D;
        m.jac_g(x, u, m.p, C, D);
        err = std::max({err, rel_err(C, fd.C), rel_err(D, fd.D)});
    }
    return err;
}

double jacobian_mismatch(const NarxModel& m, const Mat& ywin, const Mat& uwin)
{
    if (!m.jac)
        return 0.0;
    const auto fd = narx_finite_difference(m, ywin, uwin);
    std::vector<Mat> A, B;
    m.jac(ywin, uwin, m.p, A, B);
    double err = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
        err = std::max(err, rel_err(A[i], fd.A[i]));
    for (std::size_t i = 0; i < B.size(); ++i)
        err = std::max(err, rel_err(B[i], fd.B[i]));
    return err;
}

} // namespace reachconf
