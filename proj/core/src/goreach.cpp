#include "reachconf/goreach.hpp"

#include "reachconf/rng.hpp"

#include <cmath>

namespace reachconf {

const char* to_string(RemainderMode m)
{
    switch (m) {
    case RemainderMode::Zero: return "zero";
    case RemainderMode::IntervalHessian: return "interval-hessian";
    case RemainderMode::Sampled: return "sampled";
    }
    return "zero";
}

RemainderMode remainder_mode_from_string(const std::string& s)
{
    if (s == "zero")
        return RemainderMode::Zero;
    if (s == "interval-hessian")
        return RemainderMode::IntervalHessian;
    if (s == "sampled")
        return RemainderMode::Sampled;
    throw std::invalid_argument("unknown remainder mode: " + s);
}

std::pair<Vec, Mat> reference_trajectory(const TestCase& c, const UncertaintySpec& spec)
{
    if (c.nominal_u.rows() != spec.c_u.size())
        throw std::invalid_argument("reference_trajectory: input dimension mismatch");
    Vec x0;
    if (c.nominal_x0.size() > 0) {
        if (c.nominal_x0.size() != spec.c_x.size())
            throw std::invalid_argument("reference_trajectory: state dimension mismatch");
        x0 = c.nominal_x0 + spec.c_x;
    }
    Mat u = c.nominal_u.colwise() + spec.c_u;
    return {x0, u};
}

Vec reference_window(const TestCase& c, int np)
{
    if (c.samples.empty())
        throw std::invalid_argument("reference_window: test case has no samples");
    const auto ny = c.samples.front().rows();
    Vec w = Vec::Zero(ny * np);
    for (const auto& s : c.samples) {
        if (s.cols() < np)
            throw std::invalid_argument("reference_window: trajectory shorter than the model order");
        w += Eigen::Map<const Vec>(s.data(), ny * np);
    }
    return w / static_cast<double>(c.samples.size());
}

GOModel go_from_statespace(const StateSpaceModel& m, const TestCase& c, const UncertaintySpec& spec,
                           RemainderMode mode, std::uint64_t seed)
{
    const int nk = c.num_steps();
    if (nk < 1)
        throw std::invalid_argument("go_from_statespace: empty test case");
    auto [x0, ubar] = reference_trajectory(c, spec);
    if (x0.size() != m.nx)
        throw std::invalid_argument("go_from_statespace: nominal initial state required");

    GOModel go;
    go.nk = nk;
    go.ny = m.ny;
    go.nx = m.nx;
    go.nu = m.nu;
    go.xbar0 = x0;
    go.ubar = ubar;
    go.ybar.resize(nk);
    go.Cbar.resize(nk);
    go.Dbar.resize(nk);
    go.lin_A.resize(nk);
    go.lin_B.resize(nk);
    go.lin_C.resize(nk);
    go.lin_D.resize(nk);

    Vec x = x0;
    Mat Phi = Mat::Identity(m.nx, m.nx);
    std::vector<Mat> Psi; // Psi[i] = dx_k / du_i for i < k
    for (int k = 0; k < nk; ++k) {
        const Vec uk = ubar.col(k);
        const Vec yk = m.g(x, uk, m.p);
        if (!yk.allFinite())
            throw SimulationDivergedError("go_from_statespace: reference output diverged at step " + std::to_string(k));
        go.ybar[k] = yk;
        const auto J = jacobians_ss(m, x, uk);
        go.lin_A[k] = J.A;
        go.lin_B[k] = {J.B};
        go.lin_C[k] = J.C;
        go.lin_D[k] = J.D;

        go.Cbar[k] = J.C * Phi;
        auto& Dk = go.Dbar[k];
        Dk.resize(k + 1);
        for (int i = 0; i < k; ++i)
            Dk[i] = J.C * Psi[i];
        Dk[k] = J.D;

        if (k + 1 < nk) {
            for (auto& P : Psi)
                P = J.A * P;
            Psi.push_back(J.B);
            Phi = J.A * Phi;
            x = m.f(x, uk, m.p);
            if (!x.allFinite())
                throw SimulationDivergedError("go_from_statespace: reference state diverged at step " + std::to_string(k));
        }
    }
    go.remainder = remainder_enclosure(Model(m), go, c, spec, mode, seed);
    return go;
}

GOModel go_from_narx(const NarxModel& m, const TestCase& c, const UncertaintySpec& spec,
                     RemainderMode mode, std::uint64_t seed)
{
    const int nk = c.num_steps();
    const int np = m.np;
    const int ny = m.ny;
    const int nw = np * ny;
    if (nk <= np)
        throw std::invalid_argument("go_from_narx: test case must be longer than the model order");
    auto [unused, ubar] = reference_trajectory(c, spec);
    (void)unused;

    GOModel go;
    go.narx = true;
    go.nk = nk;
    go.ny = ny;
    go.nx = nw;
    go.nu = m.nu;
    go.first_valid = np;
    go.ubar = ubar;
    go.xbar0 = reference_window(c, np);
    go.ybar.resize(nk);
    go.Cbar.resize(nk);
    go.Dbar.resize(nk);
    go.lin_A.resize(nk);
    go.lin_B.resize(nk);
    go.lin_C.resize(nk);
    go.lin_D.resize(nk);

    Mat yref(ny, nk);
    yref.leftCols(np) = Eigen::Map<const Mat>(go.xbar0.data(), ny, np);
    for (int k = 0; k < np; ++k) {
        go.ybar[k] = yref.col(k);
        go.Cbar[k] = Mat::Zero(ny, nw);
        go.Dbar[k].assign(k + 1, Mat::Zero(ny, m.nu));
    }

    // S = dX_k / dX_{n_p}; T[i] = dX_k / du_i.
    Mat S = Mat::Identity(nw, nw);
    std::vector<Mat> T(static_cast<std::size_t>(nk), Mat::Zero(nw, m.nu));
    for (int k = np; k < nk; ++k) {
        const Mat ywin = yref.middleCols(k - np, np);
        const Mat uwin = ubar.middleCols(k - np, np + 1);
        const Vec yk = m.f(ywin, uwin, m.p);
        if (!yk.allFinite())
            throw SimulationDivergedError("go_from_narx: reference output diverged at step " + std::to_string(k));
        yref.col(k) = yk;
        go.ybar[k] = yk;

        const auto J = jacobians_narx(m, ywin, uwin);
        // F = [A_{k,n_p} ... A_{k,1}] acting on the oldest-first window.
        Mat F(ny, nw);
        for (int j = 0; j < np; ++j)
            F.middleCols(j * ny, ny) = J.A[static_cast<std::size_t>(np - 1 - j)];
        go.lin_C[k] = F;
        go.lin_B[k] = J.B;

        go.Cbar[k] = F * S;
        auto& Dk = go.Dbar[k];
        Dk.resize(k + 1);
        for (int i = 0; i <= k; ++i) {
            Mat d = F * T[static_cast<std::size_t>(i)];
            if (k - i <= np)
                d += J.B[static_cast<std::size_t>(k - i)];
            Dk[i] = d;
        }

        Mat Aext = Mat::Zero(nw, nw);
        if (np > 1)
            Aext.topRightCorner(nw - ny, nw - ny).setIdentity();
        Aext.bottomRows(ny) = F;
        go.lin_A[k] = Aext;
        if (k + 1 < nk) {
            for (int i = 0; i <= k; ++i) {
                Mat t = Aext * T[static_cast<std::size_t>(i)];
                if (k - i <= np)
                    t.bottomRows(ny) += J.B[static_cast<std::size_t>(k - i)];
                T[static_cast<std::size_t>(i)] = t;
            }
            S = Aext * S;
        }
    }
    go.remainder = remainder_enclosure(Model(m), go, c, spec, mode, seed);
    return go;
}

GOModel build_go(const Model& m, const TestCase& c, const UncertaintySpec& spec, RemainderMode mode,
                 std::uint64_t seed)
{
    if (const auto* ss = std::get_if<StateSpaceModel>(&m))
        return go_from_statespace(*ss, c, spec, mode, seed);
    return go_from_narx(std::get<NarxModel>(m), c, spec, mode, seed);
}

namespace {

Zonotope zero_point(int n) { return Zonotope::point(Vec::Zero(n)); }

// Radius of the interval hull of a zonotope around the origin, i.e. the
// largest absolute value each coordinate can take.
Vec abs_bound(const Zonotope& z)
{
    return z.center().cwiseAbs() + z.generators().cwiseAbs().rowwise().sum();
}

Zonotope box(const Vec& radius)
{
    return Zonotope(Vec::Zero(radius.size()), Mat(radius.asDiagonal()));
}

Vec lagrange_bound(const std::vector<Mat>& H, const Vec& rho)
{
    Vec L(static_cast<Eigen::Index>(H.size()));
    for (std::size_t i = 0; i < H.size(); ++i)
        L[static_cast<Eigen::Index>(i)] = 0.5 * rho.dot(H[i] * rho);
    return L;
}

Zonotope input_deviation(const UncertaintySpec& spec)
{
    return Zonotope(spec.cdelta_u, spec.G_u * spec.alpha_u.asDiagonal());
}

std::vector<Zonotope> interval_hessian_ss(const StateSpaceModel& m, const GOModel& go, const UncertaintySpec& spec)
{
    if (!m.hess_f || !m.hess_g)
        throw UnsupportedModeError("interval-hessian remainder needs analytic Hessian bounds for " + m.name);
    std::vector<Zonotope> E;
    const Zonotope Zu = input_deviation(spec);
    const Vec ru = abs_bound(Zu);
    Zonotope Zx(spec.cdelta_x, spec.G_x * spec.alpha_x.asDiagonal());
    Zonotope Err = zero_point(m.nx);
    Vec x = go.xbar0;
    for (int k = 0; k < go.nk; ++k) {
        const Vec uk = go.ubar.col(k);
        const Vec rx = abs_bound(Zx);
        Vec rho(m.nx + m.nu);
        rho << rx, ru;
        Vec zc(m.nx + m.nu);
        zc << x, uk;
        const Vec lo = zc - rho;
        const Vec hi = zc + rho;
        const Vec Ly = lagrange_bound(m.hess_g(lo, hi, m.p), rho);
        if (!Ly.allFinite())
            throw UnsupportedModeError("interval-hessian remainder is unbounded for " + m.name);
        E.push_back(minkowski_sum(linear_map(go.lin_C[k], Err), box(Ly)));
        if (k + 1 < go.nk) {
            const Vec Lx = lagrange_bound(m.hess_f(lo, hi, m.p), rho);
            if (!Lx.allFinite())
                throw UnsupportedModeError("interval-hessian remainder is unbounded for " + m.name);
            const Mat& A = go.lin_A[k];
            Err = minkowski_sum(linear_map(A, Err), box(Lx));
            Zx = minkowski_sum(minkowski_sum(linear_map(A, Zx), linear_map(go.lin_B[k][0], Zu)), box(Lx));
            x = m.f(x, uk, m.p);
        }
    }
    return E;
}

std::vector<Zonotope> interval_hessian_narx(const NarxModel& m, const GOModel& go, const TestCase& c,
                                            const UncertaintySpec& spec)
{
    if (!m.hess)
        throw UnsupportedModeError("interval-hessian remainder needs analytic Hessian bounds for " + m.name);
    const int np = m.np;
    const int ny = m.ny;
    const int nw = go.nx;
    std::vector<Zonotope> E(static_cast<std::size_t>(go.nk), zero_point(ny));
    const Zonotope Zu = input_deviation(spec);
    const Vec ru = abs_bound(Zu);
    // Spread of the measured windows around the reference window.
    Vec rw0 = Vec::Zero(nw);
    for (const auto& s : c.samples)
        rw0 = rw0.cwiseMax((Eigen::Map<const Vec>(s.data(), nw) - go.xbar0).cwiseAbs());
    Zonotope Zw = box(rw0);
    Zonotope Err = zero_point(nw);
    Mat yref(ny, go.nk);
    for (int k = 0; k < go.nk; ++k)
        yref.col(k) = go.ybar[static_cast<std::size_t>(k)];
    for (int k = np; k < go.nk; ++k) {
        const Vec rw = abs_bound(Zw);
        const int nz = nw + m.nu * (np + 1);
        Vec rho(nz);
        rho.head(nw) = rw;
        for (int j = 0; j <= np; ++j)
            rho.segment(nw + j * m.nu, m.nu) = ru;
        Vec zc(nz);
        const Mat ywin = yref.middleCols(k - np, np);
        const Mat uwin = go.ubar.middleCols(k - np, np + 1);
        zc << Eigen::Map<const Vec>(ywin.data(), nw), Eigen::Map<const Vec>(uwin.data(), uwin.size());
        const Vec L = lagrange_bound(m.hess(zc - rho, zc + rho, m.p), rho);
        if (!L.allFinite())
            throw UnsupportedModeError("interval-hessian remainder is unbounded for " + m.name);
        const Mat& F = go.lin_C[static_cast<std::size_t>(k)];
        E[static_cast<std::size_t>(k)] = minkowski_sum(linear_map(F, Err), box(L));

        Mat Eemb = Mat::Zero(nw, ny);
        Eemb.bottomRows(ny).setIdentity();
        const Mat& Aext = go.lin_A[static_cast<std::size_t>(k)];
        Err = minkowski_sum(linear_map(Aext, Err), linear_map(Eemb, box(L)));
        Zonotope next = minkowski_sum(linear_map(Aext, Zw), linear_map(Eemb, box(L)));
        for (int j = 0; j <= np; ++j)
            next = minkowski_sum(next, linear_map(Eemb * go.lin_B[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], Zu));
        Zw = next;
    }
    return E;
}

Vec sample_in(const Zonotope& z, Rng& rng, bool extreme)
{
    Vec lambda(z.num_generators());
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
        lambda[j] = extreme ? (rng.bernoulli(0.5) ? 1.0 : -1.0) : rng.uniform(-1.0, 1.0);
    return z.center() + z.generators() * lambda;
}

std::vector<Zonotope> sampled_remainder(const Model& model, const GOModel& go, const TestCase& c,
                                        const UncertaintySpec& spec, std::uint64_t seed, int num_samples)
{
    Rng rng(seed);
    const Zonotope Zu = input_deviation(spec);
    std::vector<Vec> worst(static_cast<std::size_t>(go.nk), Vec::Zero(go.ny));
    for (int n = 0; n < num_samples; ++n) {
        const bool extreme = (n % 2 == 0);
        Mat du(go.nu, go.nk);
        for (int k = 0; k < go.nk; ++k)
            du.col(k) = sample_in(Zu, rng, extreme);
        const Mat u = go.ubar + du;
        Mat y;
        Vec dx0;
        if (const auto* ss = std::get_if<StateSpaceModel>(&model)) {
            dx0 = sample_in(Zonotope(spec.cdelta_x, spec.G_x * spec.alpha_x.asDiagonal()), rng, extreme);
            y = simulate(*ss, go.xbar0 + dx0, u);
        } else {
            const auto& nm = std::get<NarxModel>(model);
            const auto& s = c.samples[static_cast<std::size_t>(rng.below(c.num_samples()))];
            const Mat window = s.leftCols(nm.np);
            dx0 = Eigen::Map<const Vec>(window.data(), window.size()) - go.xbar0;
            y = simulate(nm, window, u);
        }
        for (int k = go.first_valid; k < go.nk; ++k) {
            Vec pred = go.ybar[static_cast<std::size_t>(k)] + go.Cbar[static_cast<std::size_t>(k)] * dx0;
            for (int i = 0; i <= k; ++i)
                pred += go.Dbar[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * du.col(i);
            auto& w = worst[static_cast<std::size_t>(k)];
            w = w.cwiseMax((y.col(k) - pred).cwiseAbs());
        }
    }
    std::vector<Zonotope> E;
    for (const auto& w : worst)
        E.push_back(box(1.2 * w));
    return E;
}

} // namespace

std::vector<Zonotope> remainder_enclosure(const Model& m, GOModel& go, const TestCase& c,
                                          const UncertaintySpec& spec, RemainderMode mode,
                                          std::uint64_t seed, int num_samples)
{
    go.remainder_rigorous = true;
    if (mode == RemainderMode::Zero || is_linear(m))
        return std::vector<Zonotope>(static_cast<std::size_t>(go.nk), zero_point(go.ny));
    if (mode == RemainderMode::IntervalHessian) {
        if (const auto* ss = std::get_if<StateSpaceModel>(&m))
            return interval_hessian_ss(*ss, go, spec);
        return interval_hessian_narx(std::get<NarxModel>(m), go, c, spec);
    }
    go.remainder_rigorous = false;
    return sampled_remainder(m, go, c, spec, seed, num_samples);
}

Zonotope reach_go(const GOModel& go, const UncertaintySpec& spec, int k, bool overapprox)
{
    if (k < go.first_valid || k >= go.nk)
        throw std::invalid_argument("reach_go: step outside the valid range");
    const auto ks = static_cast<std::size_t>(k);
    const int ex = spec.eta_x();
    const int eu = spec.eta_u();
    const bool use_x = ex > 0 && spec.c_x.size() == go.nx;
    Vec c = go.ybar[ks];
    Mat G(go.ny, (use_x ? ex : 0) + (k + 1) * eu);
    Eigen::Index col = 0;
    if (use_x) {
        c += go.Cbar[ks] * spec.cdelta_x;
        G.leftCols(ex) = go.Cbar[ks] * spec.G_x * spec.alpha_x.asDiagonal();
        col = ex;
    }
    const Mat Gu = spec.G_u * spec.alpha_u.asDiagonal();
    for (int i = 0; i <= k; ++i) {
        const Mat& D = go.Dbar[ks][static_cast<std::size_t>(i)];
        c += D * spec.cdelta_u;
        G.middleCols(col, eu) = D * Gu;
        col += eu;
    }
    Zonotope R(c, G);
    if (overapprox && ks < go.remainder.size())
        R = minkowski_sum(R, go.remainder[ks]);
    return R;
}

Vec measurement_deviation(const GOModel& go, const TestCase& c, int s, int k)
{
    const auto& y = c.samples[static_cast<std::size_t>(s)];
    Vec ya = y.col(k) - go.ybar[static_cast<std::size_t>(k)];
    if (go.narx && k >= go.first_valid) {
        const Vec w = Eigen::Map<const Vec>(y.data(), go.nx);
        ya -= go.Cbar[static_cast<std::size_t>(k)] * (w - go.xbar0);
    }
    return ya;
}

} // namespace reachconf
