#include "reachconf/catalog.hpp"

#include <atomic>
#include <cmath>

namespace reachconf {

namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

double clamped_sqrt(double x)
{
    if (x < 0.0) {
        g_clamp_events.fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    return std::sqrt(x);
}

StateSpaceModel::Map identity_output(int nx)
{
    return [nx](const Vec& x, const Vec&, const Vec&) -> Vec { return x.head(nx); };
}

StateSpaceModel::Jacobian identity_output_jacobian(int nx, int nu)
{
    return [nx, nu](const Vec&, const Vec&, const Vec&, Mat& C, Mat& D) {
        C = Mat::Identity(nx, nx);
        D = Mat::Zero(nx, nu);
    };
}

std::vector<Mat> zero_hessians(int rows, int nz)
{
    return std::vector<Mat>(static_cast<std::size_t>(rows), Mat::Zero(nz, nz));
}

} // namespace

std::uint64_t sqrt_clamp_events() { return g_clamp_events.load(); }

StateSpaceModel water_tanks(int nx, double dt)
{
    if (nx < 1)
        throw std::invalid_argument("water_tanks: need at least one tank");
    const int nu = nx;
    const double k = 0.3;
    ContinuousDynamics dyn;
    dyn.nx = nx;
    dyn.nu = nu;
    dyn.h = [nx, k](const Vec& x, const Vec& u, const Vec&) -> Vec {
        Vec dx(nx);
        for (int i = 0; i < nx; ++i) {
            const double out = k * clamped_sqrt(x[i]);
            dx[i] = u[i] - out + (i > 0 ? k * clamped_sqrt(x[i - 1]) : 0.0);
        }
        return dx;
    };
    dyn.jac_h = [nx, nu, k](const Vec& x, const Vec&, const Vec&, Mat& dx, Mat& du) {
        dx = Mat::Zero(nx, nx);
        du = Mat::Zero(nx, nu);
        auto dsqrt = [](double v) { return v > 0.0 ? 0.5 / std::sqrt(v) : 0.0; };
        for (int i = 0; i < nx; ++i) {
            dx(i, i) = -k * dsqrt(x[i]);
            if (i > 0)
                dx(i, i - 1) = k * dsqrt(x[i - 1]);
            du(i, i) = 1.0;
        }
    };
    dyn.hess_h = [nx, nu, k](const Vec& lo, const Vec&, const Vec&) {
        auto H = zero_hessians(nx, nx + nu);
        // |d^2 sqrt(x)/dx^2| = x^{-3/2} / 4 is largest at the lower end of the box.
        auto bound = [](double l) {
            return l > 0.0 ? 0.25 * std::pow(l, -1.5) : std::numeric_limits<double>::infinity();
        };
        for (int i = 0; i < nx; ++i) {
            H[static_cast<std::size_t>(i)](i, i) = k * bound(lo[i]);
            if (i > 0)
                H[static_cast<std::size_t>(i)](i - 1, i - 1) = k * bound(lo[i - 1]);
        }
        return H;
    };
    auto m = discretize_euler(dyn, dt);
    m.name = "water_tanks" + std::to_string(nx);
    m.ny = nx;
    m.g = identity_output(nx);
    m.jac_g = identity_output_jacobian(nx, nu);
    m.hess_g = [nx, nu](const Vec&, const Vec&, const Vec&) { return zero_hessians(nx, nx + nu); };
    return m;
}

StateSpaceModel pedestrian_ss()
{
    StateSpaceModel m;
    m.name = "pedestrian_ss";
    m.nx = 4;
    m.nu = 4;
    m.ny = 2;
    m.p = Vec(4);
    m.p << 1.0, 0.01, 5e-5, 0.01;
    m.param_names = {"p1", "p2", "p3", "p4"};
    m.linear = true;
    m.jacobian_mode = JacobianMode::Analytic;
    auto AB = [](const Vec& p, Mat& A, Mat& B) {
        A = Mat::Zero(4, 4);
        A.diagonal().setConstant(p[0]);
        A(0, 2) = p[1];
        A(1, 3) = p[1];
        B = Mat::Zero(4, 4);
        B(0, 0) = p[2];
        B(1, 1) = p[2];
        B(2, 0) = p[3];
        B(3, 1) = p[3];
    };
    auto CD = [](Mat& C, Mat& D) {
        C = Mat::Zero(2, 4);
        C(0, 0) = 1.0;
        C(1, 1) = 1.0;
        D = Mat::Zero(2, 4);
        D(0, 2) = 1.0;
        D(1, 3) = 1.0;
    };
    m.f = [AB](const Vec& x, const Vec& u, const Vec& p) -> Vec {
        Mat A, B;
        AB(p, A, B);
        return A * x + B * u;
    };
    m.g = [CD](const Vec& x, const Vec& u, const Vec&) -> Vec {
        Mat C, D;
        CD(C, D);
        return C * x + D * u;
    };
    m.jac_f = [AB](const Vec&, const Vec&, const Vec& p, Mat& A, Mat& B) { AB(p, A, B); };
    m.jac_g = [CD](const Vec&, const Vec&, const Vec&, Mat& C, Mat& D) { CD(C, D); };
    m.hess_f = [](const Vec&, const Vec&, const Vec&) { return zero_hessians(4, 8); };
    m.hess_g = [](const Vec&, const Vec&, const Vec&) { return zero_hessians(2, 8); };
    return m;
}

NarxModel pedestrian_arx()
{
    NarxModel m;
    m.name = "pedestrian_arx";
    m.np = 2;
    m.nu = 4;
    m.ny = 2;
    m.p = Vec(4);
    m.p << 2.0, -2.0, 5e-5, -1.0;
    m.param_names = {"p1", "p2", "p3", "p4"};
    m.linear = true;
    m.jacobian_mode = JacobianMode::Analytic;
    auto mats = [](const Vec& p, std::vector<Mat>& A, std::vector<Mat>& B) {
        A = {p[0] * Mat::Identity(2, 2), p[1] * Mat::Identity(2, 2)};
        Mat B0 = Mat::Zero(2, 4);
        B0(0, 2) = 1.0;
        B0(1, 3) = 1.0;
        Mat B1 = Mat::Zero(2, 4);
        B1(0, 0) = p[2];
        B1(1, 1) = p[2];
        B1(0, 2) = p[3];
        B1(1, 3) = p[3];
        Mat B2 = Mat::Zero(2, 4);
        B2(0, 0) = p[2];
        B2(1, 1) = p[2];
        B2(0, 2) = 1.0;
        B2(1, 3) = 1.0;
        B = {B0, B1, B2};
    };
    m.f = [mats](const Mat& yw, const Mat& uw, const Vec& p) -> Vec {
        std::vector<Mat> A, B;
        mats(p, A, B);
        // yw columns: y_{k-2}, y_{k-1}; uw columns: u_{k-2}, u_{k-1}, u_k
        return A[0] * yw.col(1) + A[1] * yw.col(0) + B[0] * uw.col(2) + B[1] * uw.col(1) + B[2] * uw.col(0);
    };
    m.jac = [mats](const Mat&, const Mat&, const Vec& p, std::vector<Mat>& dy, std::vector<Mat>& du) {
        mats(p, dy, du);
    };
    m.hess = [](const Vec&, const Vec&, const Vec&) { return zero_hessians(2, 2 * 2 + 4 * 3); };
    return m;
}

StateSpaceModel lorenz(double dt)
{
    ContinuousDynamics dyn;
    dyn.nx = 3;
    dyn.nu = 3;
    dyn.h = [](const Vec& x, const Vec& u, const Vec& p) -> Vec {
        Vec dx(3);
        dx[0] = (p[0] + u[0]) * (x[1] - x[0]);
        dx[1] = (p[1] + u[1]) * x[0] - x[1] - x[0] * x[2];
        dx[2] = x[0] * x[1] - (p[2] + u[2]) * x[2];
        return dx;
    };
    dyn.jac_h = [](const Vec& x, const Vec& u, const Vec& p, Mat& A, Mat& B) {
        const double s = p[0] + u[0];
        const double r = p[1] + u[1];
        const double b = p[2] + u[2];
        A.resize(3, 3);
        A << -s, s, 0.0,
             r - x[2], -1.0, -x[0],
             x[1], x[0], -b;
        B = Mat::Zero(3, 3);
        B(0, 0) = x[1] - x[0];
        B(1, 1) = x[0];
        B(2, 2) = -x[2];
    };
    dyn.hess_h = [](const Vec&, const Vec&, const Vec&) {
        // z = [x1 x2 x3 u1 u2 u3]; all second derivatives are constant.
        auto H = zero_hessians(3, 6);
        auto sym = [](Mat& M, int a, int b, double v) {
            M(a, b) = std::abs(v);
            M(b, a) = std::abs(v);
        };
        sym(H[0], 3, 1, 1.0);
        sym(H[0], 3, 0, 1.0);
        sym(H[1], 4, 0, 1.0);
        sym(H[1], 0, 2, 1.0);
        sym(H[2], 0, 1, 1.0);
        sym(H[2], 5, 2, 1.0);
        return H;
    };
    auto m = discretize_euler(dyn, dt);
    m.name = "lorenz";
    m.ny = 2;
    m.p = Vec(3);
    m.p << 10.0, 28.0, 8.0 / 3.0;
    m.param_names = {"sigma", "rho", "beta"};
    m.g = [](const Vec& x, const Vec&, const Vec&) -> Vec { return x.head(2); };
    m.jac_g = [](const Vec&, const Vec&, const Vec&, Mat& C, Mat& D) {
        C = Mat::Zero(2, 3);
        C(0, 0) = 1.0;
        C(1, 1) = 1.0;
        D = Mat::Zero(2, 3);
    };
    m.hess_g = [](const Vec&, const Vec&, const Vec&) { return zero_hessians(2, 6); };
    return m;
}

NarxModel narx1()
{
    NarxModel m;
    m.name = "narx1";
    m.np = 2;
    m.nu = 2;
    m.ny = 2;
    m.p = Vec(2);
    m.p << 0.8, 1.2;
    m.param_names = {"p1", "p2"};
    m.jacobian_mode = JacobianMode::Analytic;
    // yw columns: y_{k-2}, y_{k-1}; uw columns: u_{k-2}, u_{k-1}, u_k
    m.f = [](const Mat& yw, const Mat& uw, const Vec& p) -> Vec {
        const double y1 = yw(0, 1);
        const double y2 = yw(1, 1);
        const double den = 1.0 + y2 * y2;
        Vec y(2);
        y[0] = y1 / den + p[0] * uw(0, 1);
        y[1] = y1 * y2 / den + p[1] * uw(1, 0);
        return y;
    };
    m.jac = [](const Mat& yw, const Mat&, const Vec& p, std::vector<Mat>& dy, std::vector<Mat>& du) {
        const double y1 = yw(0, 1);
        const double y2 = yw(1, 1);
        const double den = 1.0 + y2 * y2;
        Mat A1(2, 2);
        A1 << 1.0 / den, -2.0 * y1 * y2 / (den * den),
              y2 / den, y1 * (1.0 - y2 * y2) / (den * den);
        dy = {A1, Mat::Zero(2, 2)};
        Mat B1 = Mat::Zero(2, 2);
        B1(0, 0) = p[0];
        Mat B2 = Mat::Zero(2, 2);
        B2(1, 1) = p[1];
        du = {Mat::Zero(2, 2), B1, B2};
    };
    m.hess = [](const Vec& lo, const Vec& hi, const Vec&) {
        // z = [y_{k-2}; y_{k-1}; u_{k-2}; u_{k-1}; u_k]; y_{k-1,1} at 2, y_{k-1,2} at 3.
        // Global bounds of the rational factors in y_{k-1,2}, scaled by max |y_{k-1,1}|.
        const double y1max = std::max(std::abs(lo[2]), std::abs(hi[2]));
        auto H = zero_hessians(2, 10);
        H[0](2, 3) = H[0](3, 2) = 0.6495190528383;
        H[0](3, 3) = 2.0 * y1max;
        H[1](2, 3) = H[1](3, 2) = 1.0;
        H[1](3, 3) = 1.4571067798140 * y1max;
        return H;
    };
    return m;
}

StateSpaceModel kinematic_vehicle(double dt)
{
    ContinuousDynamics dyn;
    dyn.nx = 5;
    dyn.nu = 11;
    dyn.h = [](const Vec& x, const Vec& u, const Vec& p) -> Vec {
        const double rd = p[0];
        const double l = p[1];
        const double lr = p[2];
        const double beta = std::atan(std::tan(x[2]) * lr / l);
        Vec dx(5);
        dx[0] = x[3] * std::cos(beta + x[4]);
        dx[1] = x[3] * std::sin(beta + x[4]);
        dx[2] = rd * u[0];
        dx[3] = u[1];
        dx[4] = x[3] * std::cos(beta) * std::tan(x[2]) / l;
        dx += u.segment(2, 5);
        return dx;
    };
    auto m = discretize_euler(dyn, dt);
    m.name = "vehicle";
    m.ny = 4;
    m.p = Vec(3);
    m.p << 1.0 / 15.0, 3.1, 1.5;
    m.param_names = {"r_delta", "l", "l_r"};
    m.g = [](const Vec& x, const Vec& u, const Vec& p) -> Vec {
        Vec y(4);
        y << x[0], x[1], x[2] / p[0], x[3];
        return y + u.segment(7, 4);
    };
    return m;
}

Model catalog_model(const std::string& id)
{
    if (id == "pedestrian_ss")
        return pedestrian_ss();
    if (id == "pedestrian_arx")
        return pedestrian_arx();
    if (id == "lorenz")
        return lorenz();
    if (id == "narx1")
        return narx1();
    if (id == "vehicle")
        return kinematic_vehicle();
    const std::string tanks = "water_tanks";
    if (id.rfind(tanks, 0) == 0) {
        const auto rest = id.substr(tanks.size());
        return water_tanks(rest.empty() ? 3 : std::stoi(rest));
    }
    throw std::invalid_argument("unknown system id: " + id);
}

} // namespace reachconf
