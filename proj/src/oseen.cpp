#include "mkv/oseen.hpp"

#include <cmath>
#include <cstring>

#include "mkv/kernels.hpp"
#include "mkv/log.hpp"

namespace mkv {

void MacField::init(const ConvexDomain& omega, int n_cells) {
    if (omega.kind != ConvexDomain::Kind::box || omega.dim != 2)
        throw ConfigError("MacField: flow domain must be a 2-D box");
    const double wx = omega.hi[0] - omega.lo[0];
    const double wy = omega.hi[1] - omega.lo[1];
    if (std::fabs(wx - wy) > 1e-12 * wx)
        throw ConfigError("MacField: box must be square (uniform spacing)");
    n = n_cells;
    h = wx / n;
    lo[0] = omega.lo[0];
    lo[1] = omega.lo[1];
    hi[0] = omega.hi[0];
    hi[1] = omega.hi[1];
    u.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
    v.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
    p.assign(static_cast<std::size_t>(n) * n, 0.0);
    u_wall_bot.assign(n + 1, 0.0);
    u_wall_top.assign(n + 1, 0.0);
    v_wall_left.assign(n + 1, 0.0);
    v_wall_right.assign(n + 1, 0.0);
    time = 0.0;
}

double MacField::max_divergence() const {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double div =
                (u_at(i + 1, j) - u_at(i, j) + v_at(i, j + 1) - v_at(i, j)) / h;
            m = std::max(m, std::fabs(div));
        }
    return m;
}

double MacField::energy() const {
    using kernels::ops;
    const double su = ops().dot(u.data(), u.data(), u.size());
    const double sv = ops().dot(v.data(), v.data(), v.size());
    return 0.5 * h * h * (su + sv);
}

double MacField::max_abs() const {
    using kernels::ops;
    return std::max(ops().max_abs(u.data(), u.size()),
                    ops().max_abs(v.data(), v.size()));
}

namespace {

// 1-D interpolation weights for a cell-centered row of m points padded by
// wall values at both ends: positions lo, lo+h/2, lo+3h/2, ..., hi.
struct RowInterp {
    int i0, i1;     // indices into the padded row
    double w0, w1;  // weights
};

RowInterp row_weights(double x, double lo, double h, int m) {
    // padded coordinates: index 0 -> lo; index k (1..m) -> lo + (k-1/2) h;
    // index m+1 -> lo + m h.
    const double s = (x - lo) / h;
    if (s <= 0.5) {
        const double w = s / 0.5;
        return {0, 1, 1.0 - w, w};
    }
    if (s >= m - 0.5) {
        const double w = (s - (m - 0.5)) / 0.5;
        return {m, m + 1, 1.0 - w, w};
    }
    const int k = static_cast<int>(s - 0.5);
    const double w = (s - 0.5) - k;
    return {k + 1, k + 2, 1.0 - w, w};
}

}  // namespace

void MacField::sample(const double* x, double* out) const {
    const double tol = 1e-12 * (hi[0] - lo[0]);
    if (x[0] < lo[0] - tol || x[0] > hi[0] + tol || x[1] < lo[1] - tol ||
        x[1] > hi[1] + tol)
        throw OutsideDomain("MacField::sample: point outside the flow domain");
    const double X = std::min(std::max(x[0], lo[0]), hi[0]);
    const double Y = std::min(std::max(x[1], lo[1]), hi[1]);

    // u: uniform lattice in x (faces), padded cell-centered lattice in y.
    {
        double s = (X - lo[0]) / h;
        int i = static_cast<int>(s);
        if (i > n - 1) i = n - 1;
        const double wx = s - i;
        const RowInterp ry = row_weights(Y, lo[1], h, n);
        auto uval = [&](int ii, int kpad) -> double {
            if (kpad == 0) return u_wall_bot[ii];
            if (kpad == n + 1) return u_wall_top[ii];
            return u_at(ii, kpad - 1);
        };
        out[0] = (1.0 - wx) * (ry.w0 * uval(i, ry.i0) + ry.w1 * uval(i, ry.i1)) +
                 wx * (ry.w0 * uval(i + 1, ry.i0) + ry.w1 * uval(i + 1, ry.i1));
    }
    // v: padded lattice in x, uniform face lattice in y.
    {
        double s = (Y - lo[1]) / h;
        int j = static_cast<int>(s);
        if (j > n - 1) j = n - 1;
        const double wy = s - j;
        const RowInterp rx = row_weights(X, lo[0], h, n);
        auto vval = [&](int kpad, int jj) -> double {
            if (kpad == 0) return v_wall_left[jj];
            if (kpad == n + 1) return v_wall_right[jj];
            return v_at(kpad - 1, jj);
        };
        out[1] = (1.0 - wy) * (rx.w0 * vval(rx.i0, j) + rx.w1 * vval(rx.i1, j)) +
                 wy * (rx.w0 * vval(rx.i0, j + 1) + rx.w1 * vval(rx.i1, j + 1));
    }
}

std::vector<double> stress_divergence(const StressField& K) {
    const int d = K.d;
    const RGrid& g = K.grid;
    const std::size_t cells = g.cells();
    std::vector<double> out(cells * d, 0.0);
    std::vector<int> idx(d);
    for (std::size_t c = 0; c < cells; ++c) {
        g.unflatten(c, idx.data());
        for (int i = 0; i < d; ++i) {
            double div = 0.0;
            for (int j = 0; j < d; ++j) {
                // d K_ij / d x_j, centered in the interior, one-sided at walls
                const int m = g.n[j];
                const int cj = idx[j];
                std::vector<int> q(idx);
                double dk;
                if (cj > 0 && cj + 1 < m) {
                    q[j] = cj + 1;
                    const double kp = K.tensor(g.flat(q.data()))[i * d + j];
                    q[j] = cj - 1;
                    const double km = K.tensor(g.flat(q.data()))[i * d + j];
                    dk = (kp - km) / (2.0 * g.h[j]);
                } else if (cj == 0) {
                    q[j] = cj + 1;
                    const double kp = K.tensor(g.flat(q.data()))[i * d + j];
                    dk = (kp - K.tensor(c)[i * d + j]) / g.h[j];
                } else {
                    q[j] = cj - 1;
                    const double km = K.tensor(g.flat(q.data()))[i * d + j];
                    dk = (K.tensor(c)[i * d + j] - km) / g.h[j];
                }
                if (m == 1) dk = 0.0;
                div += dk;
            }
            out[c * d + i] = div;
        }
    }
    return out;
}

FaceSource face_source_from_cells(const RGrid& grid, const std::vector<double>& g) {
    if (grid.P != 2) throw GridMismatch("face_source_from_cells: need a 2-D grid");
    const int n = grid.n[0];
    if (grid.n[1] != n) throw GridMismatch("face_source_from_cells: grid not square");
    FaceSource s;
    s.fx.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
    s.fy.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
    auto cell = [&](int i, int j, int c) {
        return g[(static_cast<std::size_t>(i) * n + j) * 2 + c];
    };
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.fx[static_cast<std::size_t>(i) * n + j] =
                0.5 * (cell(i - 1, j, 0) + cell(i, j, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j)
            s.fy[static_cast<std::size_t>(i) * (n + 1) + j] =
                0.5 * (cell(i, j - 1, 1) + cell(i, j, 1));
    return s;
}

FaceSource face_source_from_function(
    const MacField& f, const std::function<void(double, double, double*)>& fn,
    double t) {
    (void)t;
    const int n = f.n;
    FaceSource s;
    s.fx.assign(static_cast<std::size_t>(n + 1) * n, 0.0);
    s.fy.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
    double val[2];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            fn(f.lo[0] + i * f.h, f.lo[1] + (j + 0.5) * f.h, val);
            s.fx[static_cast<std::size_t>(i) * n + j] = val[0];
        }
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) {
            fn(f.lo[0] + (i + 0.5) * f.h, f.lo[1] + j * f.h, val);
            s.fy[static_cast<std::size_t>(i) * (n + 1) + j] = val[1];
        }
    return s;
}

void fill_from_streamfunction(MacField& f, double amplitude) {
    const int n = f.n;
    const double cx = 0.5 * (f.lo[0] + f.hi[0]);
    const double cy = 0.5 * (f.lo[1] + f.hi[1]);
    const double sx = 0.5 * (f.hi[0] - f.lo[0]);
    const double sy = 0.5 * (f.hi[1] - f.lo[1]);
    std::vector<double> psi(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i) {
        const double xh = (f.lo[0] + i * f.h - cx) / sx;
        for (int j = 0; j <= n; ++j) {
            const double yh = (f.lo[1] + j * f.h - cy) / sy;
            const double px = (1.0 - xh * xh);
            const double py = (1.0 - yh * yh);
            psi[static_cast<std::size_t>(i) * (n + 1) + j] =
                amplitude * px * px * py * py;
        }
    }
    auto at = [&](int i, int j) { return psi[static_cast<std::size_t>(i) * (n + 1) + j]; };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < n; ++j)
            f.u_at(i, j) = (at(i, j + 1) - at(i, j)) / f.h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n; ++j)
            f.v_at(i, j) = -(at(i + 1, j) - at(i, j)) / f.h;
}

namespace {

// Conjugate gradients with a diagonal-free identity preconditioner; the
// matvec is a callable. Vectors include pinned entries which the matvec maps
// through the identity.
template <typename MatVec>
long cg_solve(const MatVec& A, const std::vector<double>& rhs, std::vector<double>& x,
              double rel_tol, double abs_tol_inf, int maxiter, const char* what) {
    using kernels::ops;
    const std::size_t n = rhs.size();
    std::vector<double> r(n), pdir(n), Ap(n);
    A(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
    pdir = r;
    double rr = ops().dot(r.data(), r.data(), n);
    const double rhs_norm = std::sqrt(ops().dot(rhs.data(), rhs.data(), n));
    const double stop2 = rel_tol * rel_tol * std::max(rhs_norm * rhs_norm, 1e-300);
    for (int it = 0; it < maxiter; ++it) {
        if (rr <= stop2 && ops().max_abs(r.data(), n) <= abs_tol_inf) return it;
        A(pdir, Ap);
        const double pAp = ops().dot(pdir.data(), Ap.data(), n);
        if (pAp <= 0.0) break;
        const double alpha = rr / pAp;
        ops().axpy(alpha, pdir.data(), x.data(), n);
        ops().axpy(-alpha, Ap.data(), r.data(), n);
        const double rr_new = ops().dot(r.data(), r.data(), n);
        const double beta = rr_new / rr;
        rr = rr_new;
        ops().scale_add(1.0, r.data(), beta, pdir.data(), pdir.data(), n);
    }
    if (rr <= stop2 && ops().max_abs(r.data(), n) <= abs_tol_inf)
        return maxiter;
    throw LinearSolveFailure(std::string("cg failed to converge: ") + what);
}

}  // namespace

OseenSolver::OseenSolver(const FlowParams& params) : params_(params) {
    if (!(params.mu > 0.0)) throw ConfigError("OseenSolver: mu must be positive");
    f_.init(params.omega, params.n);
    b_.init(params.omega, params.n);
    if (params.b_kind == FlowParams::FieldKind::vortex)
        fill_from_streamfunction(b_, params.b_amplitude);
    if (params.u0_kind == FlowParams::FieldKind::vortex)
        fill_from_streamfunction(f_, params.u0_amplitude);
    if (b_.max_divergence() > params.tol_div)
        throw ConfigError("OseenSolver: advecting field is not discretely solenoidal");
    phi_.assign(static_cast<std::size_t>(params.n) * params.n, 0.0);
}

double OseenSolver::advective_cfl_dt() const {
    const double bmax = b_.max_abs();
    if (bmax == 0.0) return INFINITY;
    return f_.h / (2.0 * bmax);
}

void OseenSolver::step(double dt, const FaceSource* source) {
    using kernels::ops;
    const int n = f_.n;
    const double h = f_.h;
    const double mu = params_.mu;
    if (!(dt > 0.0)) throw ConfigError("OseenSolver::step: dt must be positive");
    if (dt > advective_cfl_dt())
        throw StabilityViolation("OseenSolver::step: dt exceeds the advective CFL bound");

    const std::size_t nu = f_.u.size();
    const std::size_t nv = f_.v.size();
    std::vector<double> rhs_u(nu, 0.0), rhs_v(nv, 0.0);

    auto u_of = [&](const std::vector<double>& a, int i, int j) -> double {
        return a[static_cast<std::size_t>(i) * n + j];
    };
    auto v_of = [&](const std::vector<double>& a, int i, int j) -> double {
        return a[static_cast<std::size_t>(i) * (n + 1) + j];
    };

    // Momentum right-hand sides: u^n - dt ((b.grad)u^n + grad p^n - f).
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double bx = b_.u_at(i, j);
            const double by = 0.25 * (b_.v_at(i - 1, j) + b_.v_at(i, j) +
                                      b_.v_at(i - 1, j + 1) + b_.v_at(i, j + 1));
            const double uc = f_.u_at(i, j);
            double dudx;
            if (bx >= 0.0)
                dudx = (uc - f_.u_at(i - 1, j)) / h;
            else
                dudx = (f_.u_at(i + 1, j) - uc) / h;
            double dudy;
            if (by >= 0.0) {
                const double us = (j > 0) ? f_.u_at(i, j - 1) : -uc;  // ghost at wall
                dudy = (uc - us) / h;
            } else {
                const double un = (j + 1 < n) ? f_.u_at(i, j + 1) : -uc;
                dudy = (un - uc) / h;
            }
            const double dpdx = (f_.p_at(i, j) - f_.p_at(i - 1, j)) / h;
            const double fx = source ? source->fx[static_cast<std::size_t>(i) * n + j] : 0.0;
            rhs_u[static_cast<std::size_t>(i) * n + j] =
                uc + dt * (fx - bx * dudx - by * dudy - dpdx);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            const double by = b_.v_at(i, j);
            const double bx = 0.25 * (b_.u_at(i, j - 1) + b_.u_at(i, j) +
                                      b_.u_at(i + 1, j - 1) + b_.u_at(i + 1, j));
            const double vc = f_.v_at(i, j);
            double dvdy;
            if (by >= 0.0)
                dvdy = (vc - f_.v_at(i, j - 1)) / h;
            else
                dvdy = (f_.v_at(i, j + 1) - vc) / h;
            double dvdx;
            if (bx >= 0.0) {
                const double vw = (i > 0) ? f_.v_at(i - 1, j) : -vc;
                dvdx = (vc - vw) / h;
            } else {
                const double ve = (i + 1 < n) ? f_.v_at(i + 1, j) : -vc;
                dvdx = (ve - vc) / h;
            }
            const double dpdy = (f_.p_at(i, j) - f_.p_at(i, j - 1)) / h;
            const double fy =
                source ? source->fy[static_cast<std::size_t>(i) * (n + 1) + j] : 0.0;
            rhs_v[static_cast<std::size_t>(i) * (n + 1) + j] =
                vc + dt * (fy - bx * dvdx - by * dvdy - dpdy);
        }
    }

    // Implicit diffusion: (I - mu dt Lap) u* = rhs, Dirichlet walls.
    const double lam = mu * dt / (h * h);
    auto helm_u = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j < n; ++j) {
                const std::size_t id = static_cast<std::size_t>(i) * n + j;
                if (i == 0 || i == n) {
                    y[id] = x[id];
                    continue;
                }
                const double xc = u_of(x, i, j);
                const double xw = u_of(x, i - 1, j);
                const double xe = u_of(x, i + 1, j);
                const double xs = (j > 0) ? u_of(x, i, j - 1) : -xc;
                const double xn2 = (j + 1 < n) ? u_of(x, i, j + 1) : -xc;
                y[id] = xc - lam * (xw + xe + xs + xn2 - 4.0 * xc);
            }
        }
        // pinned rows already handled above (i == 0, n); interior reads of
        // boundary columns use their x values, which stay zero.
    };
    auto helm_v = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const std::size_t id = static_cast<std::size_t>(i) * (n + 1) + j;
                if (j == 0 || j == n) {
                    y[id] = x[id];
                    continue;
                }
                const double xc = v_of(x, i, j);
                const double xs = v_of(x, i, j - 1);
                const double xn2 = v_of(x, i, j + 1);
                const double xw = (i > 0) ? v_of(x, i - 1, j) : -xc;
                const double xe = (i + 1 < n) ? v_of(x, i + 1, j) : -xc;
                y[id] = xc - lam * (xw + xe + xs + xn2 - 4.0 * xc);
            }
        }
    };

    // Boundary rows: rhs = 0 keeps the walls pinned.
    cg_iters_ += cg_solve(helm_u, rhs_u, f_.u, params_.cg_tol, INFINITY,
                          params_.cg_maxiter, "momentum u");
    cg_iters_ += cg_solve(helm_v, rhs_v, f_.v, params_.cg_tol, INFINITY,
                          params_.cg_maxiter, "momentum v");

    project(dt);
    f_.time += dt;
}

void OseenSolver::project(double dt) {
    using kernels::ops;
    const int n = f_.n;
    const double h = f_.h;
    const std::size_t nc = static_cast<std::size_t>(n) * n;

    std::vector<double> rhs(nc);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rhs[static_cast<std::size_t>(i) * n + j] =
                (f_.u_at(i + 1, j) - f_.u_at(i, j) + f_.v_at(i, j + 1) - f_.v_at(i, j)) /
                (h * dt);
    const double mean = ops().sum(rhs.data(), nc) / static_cast<double>(nc);
    for (double& x : rhs) x -= mean;

    auto pois = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const std::size_t id = static_cast<std::size_t>(i) * n + j;
                const double xc = x[id];
                double acc = 0.0;
                if (i > 0) acc += x[id - n] - xc;
                if (i + 1 < n) acc += x[id + n] - xc;
                if (j > 0) acc += x[id - 1] - xc;
                if (j + 1 < n) acc += x[id + 1] - xc;
                y[id] = -acc / (h * h);  // negated Laplacian: SPD on mean-zero
            }
        }
    };
    for (double& x : rhs) x = -x;

    std::fill(phi_.begin(), phi_.end(), 0.0);
    // Absolute tolerance keeps the post-projection divergence within budget.
    const double abs_tol = 0.25 * params_.tol_div / dt;
    cg_iters_ += cg_solve(pois, rhs, phi_, params_.cg_tol, abs_tol,
                          params_.cg_maxiter, "pressure poisson");
    const double pm = ops().sum(phi_.data(), nc) / static_cast<double>(nc);
    for (double& x : phi_) x -= pm;

    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f_.u_at(i, j) -= dt *
                (phi_[static_cast<std::size_t>(i) * n + j] -
                 phi_[static_cast<std::size_t>(i - 1) * n + j]) /
                h;
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j)
            f_.v_at(i, j) -= dt *
                (phi_[static_cast<std::size_t>(i) * n + j] -
                 phi_[static_cast<std::size_t>(i) * n + j - 1]) /
                h;

    for (std::size_t k = 0; k < nc; ++k) f_.p[k] += phi_[k];
    const double pmean = ops().sum(f_.p.data(), nc) / static_cast<double>(nc);
    for (double& x : f_.p) x -= pmean;
}

namespace mms {

namespace {
double P(double x) { const double a = 1.0 - x * x; return a * a; }
double Pp(double x) { return 4.0 * x * x * x - 4.0 * x; }
double Ppp(double x) { return 12.0 * x * x - 4.0; }
double Pppp(double x) { return 24.0 * x; }
}  // namespace

double exact_u(double x, double y, double t) { return std::exp(-t) * P(x) * Pp(y); }
double exact_v(double x, double y, double t) { return -std::exp(-t) * Pp(x) * P(y); }

void forcing(double x, double y, double t, double mu, double* f) {
    const double et = std::exp(-t);
    const double pi = M_PI;
    const double u = et * P(x) * Pp(y);
    const double v = -et * Pp(x) * P(y);
    const double lap_u = et * (Ppp(x) * Pp(y) + P(x) * Pppp(y));
    const double lap_v = -et * (Pppp(x) * P(y) + Pp(x) * Ppp(y));
    const double px = pi * et * std::cos(pi * x) * std::sin(pi * y);
    const double py = pi * et * std::sin(pi * x) * std::cos(pi * y);
    f[0] = -u - mu * lap_u + px;
    f[1] = -v - mu * lap_v + py;
}

double velocity_error(const MacField& f, double t) {
    double s = 0.0;
    for (int i = 0; i <= f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            const double x = f.lo[0] + i * f.h;
            const double y = f.lo[1] + (j + 0.5) * f.h;
            const double e = f.u_at(i, j) - exact_u(x, y, t);
            s += e * e;
        }
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j <= f.n; ++j) {
            const double x = f.lo[0] + (i + 0.5) * f.h;
            const double y = f.lo[1] + j * f.h;
            const double e = f.v_at(i, j) - exact_v(x, y, t);
            s += e * e;
        }
    return std::sqrt(f.h * f.h * s);
}

void init_field(MacField& f) {
    // psi(x,y,0) = P(x) P(y); u = psi_y, v = -psi_x on the staggered faces
    // built from node differences (exactly divergence-free).
    const int n = f.n;
    std::vector<double> psi(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            psi[static_cast<std::size_t>(i) * (n + 1) + j] =
                P(f.lo[0] + i * f.h) * P(f.lo[1] + j * f.h);
    auto at = [&](int i, int j) { return psi[static_cast<std::size_t>(i) * (n + 1) + j]; };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < n; ++j) f.u_at(i, j) = (at(i, j + 1) - at(i, j)) / f.h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n; ++j) f.v_at(i, j) = -(at(i + 1, j) - at(i, j)) / f.h;
}

}  // namespace mms

}  // namespace mkv
