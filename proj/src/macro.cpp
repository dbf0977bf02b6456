#include "mkv/macro.hpp"

#include <algorithm>
#include <cmath>

#include "mkv/rng.hpp"

namespace mkv {

RouseStructure build_rouse(int J) {
    if (J < 1) throw ConfigError("build_rouse: J must be >= 1");
    RouseStructure s;
    s.J = J;
    s.B.assign(static_cast<std::size_t>(J + 1) * J, 0);
    // spring j starts at bead j and ends at bead j+1
    for (int j = 0; j < J; ++j) {
        s.B[static_cast<std::size_t>(j) * J + j] = -1;
        s.B[static_cast<std::size_t>(j + 1) * J + j] = 1;
    }
    s.R.assign(static_cast<std::size_t>(J) * J, 0);
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j) {
            int acc = 0;
            for (int k = 0; k <= J; ++k)
                acc += s.B[static_cast<std::size_t>(k) * J + i] *
                       s.B[static_cast<std::size_t>(k) * J + j];
            s.R[static_cast<std::size_t>(i) * J + j] = acc;
        }
    return s;
}

std::vector<double> RouseStructure::eigenvalues_closed_form() const {
    std::vector<double> ev(J);
    for (int k = 1; k <= J; ++k) {
        const double s = std::sin(k * M_PI / (2.0 * (J + 1)));
        ev[k - 1] = 4.0 * s * s;
    }
    return ev;
}

std::vector<double> RouseStructure::eigenvalues_numeric() const {
    // Cyclic Jacobi on the small symmetric matrix.
    const int n = J;
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n * n; ++i) m[i] = R[i];
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::fabs(at(i, j));
        if (off < 1e-15) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(at(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * at(p, q), at(q, q) - at(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double mkp = at(k, p), mkq = at(k, q);
                    at(k, p) = c * mkp - s * mkq;
                    at(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = at(p, k), mqk = at(q, k);
                    at(p, k) = c * mpk - s * mqk;
                    at(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

void change_of_variables(const double* r, int J, int d, double* q, double* x) {
    for (int c = 0; c < d; ++c) {
        double m = 0.0;
        for (int j = 0; j <= J; ++j) m += r[j * d + c];
        x[c] = m / (J + 1);
    }
    for (int j = 0; j < J; ++j)
        for (int c = 0; c < d; ++c) q[j * d + c] = r[(j + 1) * d + c] - r[j * d + c];
}

void assemble_positions(const double* q, const double* x, int J, int d, double* r) {
    // cumulative connector sums centred so that mean(r) = x
    std::vector<double> s(static_cast<std::size_t>(J + 1) * d, 0.0);
    for (int j = 1; j <= J; ++j)
        for (int c = 0; c < d; ++c)
            s[j * d + c] = s[(j - 1) * d + c] + q[(j - 1) * d + c];
    for (int c = 0; c < d; ++c) {
        double m = 0.0;
        for (int j = 0; j <= J; ++j) m += s[j * d + c];
        m /= (J + 1);
        for (int j = 0; j <= J; ++j) r[j * d + c] = x[c] + s[j * d + c] - m;
    }
}

double operator_identity_check(int J, int d, const ScalarField& f, int n_points,
                               double fd_step, std::uint64_t seed) {
    const int nb = J + 1;
    const int dof = nb * d;
    const RouseStructure rouse = build_rouse(J);
    CounterRng rng(seed, 0);
    std::vector<double> r(dof), q(static_cast<std::size_t>(J) * d), x(d);
    std::vector<double> rp(dof);
    const double h = fd_step;

    auto F = [&](const double* qq, const double* xx) {
        assemble_positions(qq, xx, J, d, rp.data());
        return f(rp.data());
    };

    double max_err = 0.0;
    for (int pt = 0; pt < n_points; ++pt) {
        for (int k = 0; k < dof; ++k) r[k] = 2.0 * rng.uniform() - 1.0;
        change_of_variables(r.data(), J, d, q.data(), x.data());
        const double f0 = f(r.data());

        // LHS: sum of second differences in the bead coordinates.
        double lhs = 0.0;
        for (int k = 0; k < dof; ++k) {
            std::vector<double> rr(r);
            rr[k] = r[k] + h;
            const double fp = f(rr.data());
            rr[k] = r[k] - h;
            const double fm = f(rr.data());
            lhs += (fp - 2.0 * f0 + fm) / (h * h);
        }

        // RHS: dq^T R dq + (1/(J+1)) dx^2 in the (q, x) coordinates.
        const double F0 = F(q.data(), x.data());
        double rhs = 0.0;
        std::vector<double> qq(q);
        for (int i = 0; i < J; ++i) {
            for (int c = 0; c < d; ++c) {
                // diagonal: R_ii d^2/dq_ic^2
                qq = q;
                qq[i * d + c] = q[i * d + c] + h;
                const double fp = F(qq.data(), x.data());
                qq[i * d + c] = q[i * d + c] - h;
                const double fm = F(qq.data(), x.data());
                rhs += rouse.r_at(i, i) * (fp - 2.0 * F0 + fm) / (h * h);
            }
        }
        for (int i = 0; i < J; ++i) {
            for (int j = 0; j < J; ++j) {
                if (i == j || rouse.r_at(i, j) == 0) continue;
                for (int c = 0; c < d; ++c) {
                    // mixed term: R_ij d^2/(dq_ic dq_jc), central cross stencil
                    qq = q;
                    qq[i * d + c] += h;
                    qq[j * d + c] += h;
                    const double fpp = F(qq.data(), x.data());
                    qq = q;
                    qq[i * d + c] += h;
                    qq[j * d + c] -= h;
                    const double fpm = F(qq.data(), x.data());
                    qq = q;
                    qq[i * d + c] -= h;
                    qq[j * d + c] += h;
                    const double fmp = F(qq.data(), x.data());
                    qq = q;
                    qq[i * d + c] -= h;
                    qq[j * d + c] -= h;
                    const double fmm = F(qq.data(), x.data());
                    rhs += rouse.r_at(i, j) * (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                }
            }
        }
        std::vector<double> xx(x);
        for (int c = 0; c < d; ++c) {
            xx = std::vector<double>(x);
            xx[c] = x[c] + h;
            const double fp = F(q.data(), xx.data());
            xx[c] = x[c] - h;
            const double fm = F(q.data(), xx.data());
            rhs += (fp - 2.0 * F0 + fm) / (h * h) / (J + 1);
        }
        max_err = std::max(max_err, std::fabs(lhs - rhs));
    }
    return max_err;
}

EtaSolver::EtaSolver(int n_beads, int d, const ConvexDomain& omega, int n_r,
                     double beta, bool drift_enabled)
    : nb_(n_beads), d_(d), beta_(beta), drift_(drift_enabled) {
    if (n_beads < 1) throw ConfigError("EtaSolver: need at least one bead");
    if (omega.kind != ConvexDomain::Kind::box || omega.dim != d)
        throw ConfigError("EtaSolver: domain must be a box of dimension d");
    if (n_r < 2) throw GridTooCoarse("EtaSolver: n_r must be at least 2");
    if (!(beta > 0.0)) throw ConfigError("EtaSolver: beta must be positive");

    const int P = nb_ * d_;
    std::vector<int> nn(P, n_r);
    std::vector<double> lo(P), hi(P);
    for (int k = 0; k < P; ++k) {
        lo[k] = omega.lo[k % d_];
        hi[k] = omega.hi[k % d_];
    }
    grid_ = RGrid(nn, lo, hi);
    eta_.assign(grid_.cells(), 0.0);

    const std::size_t N = grid_.cells();
    G_.assign(N, 1.0);
    std::vector<int> idx(P);
    std::vector<double> rpos(P);
    if (drift_) {
        for (std::size_t c = 0; c < N; ++c) {
            grid_.unflatten(c, idx.data());
            for (int k = 0; k < P; ++k) rpos[k] = grid_.center(k, idx[k]);
            G_[c] = std::exp(-chain_potential(rpos.data(), nb_, d_) / beta_);
        }
    }

    stride_.assign(P, 1);
    for (int k = P - 2; k >= 0; --k)
        stride_[k] = stride_[k + 1] * static_cast<std::size_t>(grid_.n[k + 1]);
    lines_.assign(P, {});
    Gface_.assign(P, {});
    for (int k = 0; k < P; ++k) {
        for (std::size_t c = 0; c < N; ++c)
            if ((c / stride_[k]) % static_cast<std::size_t>(n_r) == 0)
                lines_[k].push_back(c);
        Gface_[k].assign(lines_[k].size() * static_cast<std::size_t>(n_r + 1), 1.0);
        if (drift_) {
            for (std::size_t ln = 0; ln < lines_[k].size(); ++ln) {
                grid_.unflatten(lines_[k][ln], idx.data());
                for (int m = 0; m < P; ++m) rpos[m] = grid_.center(m, idx[m]);
                for (int i = 0; i <= n_r; ++i) {
                    rpos[k] = grid_.face(k, i);
                    Gface_[k][ln * (n_r + 1) + i] =
                        std::exp(-chain_potential(rpos.data(), nb_, d_) / beta_);
                }
            }
        }
    }
}

void EtaSolver::bead_position(const int* idx, int bead, double* pos) const {
    for (int c = 0; c < d_; ++c)
        pos[c] = grid_.center(bead * d_ + c, idx[bead * d_ + c]);
}

void EtaSolver::set_uniform() {
    std::fill(eta_.begin(), eta_.end(), 1.0);
    normalize_mass();
}

void EtaSolver::set_density(const std::function<double(const double* r)>& f) {
    const int P = nb_ * d_;
    std::vector<int> idx(P);
    std::vector<double> rpos(P);
    for (std::size_t c = 0; c < grid_.cells(); ++c) {
        grid_.unflatten(c, idx.data());
        for (int k = 0; k < P; ++k) rpos[k] = grid_.center(k, idx[k]);
        const double val = f(rpos.data());
        if (val < 0.0) throw ConfigError("EtaSolver: density must be nonnegative");
        eta_[c] = val;
    }
    normalize_mass();
}

void EtaSolver::normalize_mass() {
    const double m = mass();
    if (!(m > 0.0)) throw ConfigError("EtaSolver: zero-mass state");
    for (double& x : eta_) x /= m;
}

double EtaSolver::mass() const {
    double acc = 0.0;
    for (double x : eta_) acc += x;
    return acc * grid_.cell_volume();
}

double EtaSolver::min_value() const {
    double m = eta_.empty() ? 0.0 : eta_[0];
    for (double x : eta_) m = std::min(m, x);
    return m;
}

double EtaSolver::max_value() const {
    double m = 0.0;
    for (double x : eta_) m = std::max(m, x);
    return m;
}

std::vector<double> EtaSolver::gibbs_reference() const {
    std::vector<double> g(G_);
    double s = 0.0;
    for (double x : g) s += x;
    s *= grid_.cell_volume();
    for (double& x : g) x /= s;
    return g;
}

double EtaSolver::stable_dt(const VelocitySampler* u) const {
    const int P = nb_ * d_;
    const int nr = grid_.n[0];
    double rate = 0.0;
    std::vector<int> idx(P);
    double pos[3], uval[3];
    for (int k = 0; k < P; ++k) {
        const double h = grid_.h[k];
        for (std::size_t ln = 0; ln < lines_[k].size(); ++ln) {
            const std::size_t base = lines_[k][ln];
            const double* Gf = Gface_[k].data() + ln * (nr + 1);
            for (int i = 0; i < nr; ++i) {
                const std::size_t c = base + i * stride_[k];
                double cr = beta_ * (Gf[i] + Gf[i + 1]) / (G_[c] * h * h);
                if (u) {
                    grid_.unflatten(c, idx.data());
                    bead_position(idx.data(), k / d_, pos);
                    u->eval(pos, t_, uval);
                    cr += std::fabs(uval[k % d_]) / h;
                }
                rate = std::max(rate, cr);
            }
        }
    }
    return 0.9 / (rate * P);
}

void EtaSolver::step(double dt, const VelocitySampler* u) {
    if (!(dt > 0.0)) throw ConfigError("EtaSolver::step: dt must be positive");
    if (dt > stable_dt(u) * 1.0000001)
        throw StabilityViolation("EtaSolver::step: dt exceeds the explicit bound");
    const int P = nb_ * d_;
    const int nr = grid_.n[0];
    scratch_.assign(eta_.size(), 0.0);

    std::vector<int> idx(P);
    double pos[3], uval[3];
    for (int k = 0; k < P; ++k) {
        const double h = grid_.h[k];
        const std::size_t st = stride_[k];
        for (std::size_t ln = 0; ln < lines_[k].size(); ++ln) {
            const std::size_t base = lines_[k][ln];
            const double* Gf = Gface_[k].data() + ln * (nr + 1);
            for (int i = 1; i < nr; ++i) {  // interior faces only: zero-flux walls
                const std::size_t cl = base + (i - 1) * st;
                const std::size_t cr = base + i * st;
                // diffusion in the ratio variable absorbs the spring drift
                double flux = -beta_ * Gf[i] * (eta_[cr] / G_[cr] - eta_[cl] / G_[cl]) / h;
                if (u) {
                    grid_.unflatten(cl, idx.data());
                    idx[k] = i;  // face position along k: use midpoint bead coords
                    bead_position(idx.data(), k / d_, pos);
                    pos[k % d_] = grid_.face(k, i);
                    u->eval(pos, t_, uval);
                    const double a = uval[k % d_];
                    flux += a * (a > 0.0 ? eta_[cl] : eta_[cr]);
                }
                scratch_[cl] -= flux / h;
                scratch_[cr] += flux / h;
            }
        }
    }
    for (std::size_t c = 0; c < eta_.size(); ++c) eta_[c] += dt * scratch_[c];
    t_ += dt;
}

ClassicalGrid make_classical_grid(int J, int d, const ConvexDomain& omega, int n_x,
                                  int n_q, double beta) {
    if (omega.kind != ConvexDomain::Kind::box || omega.dim != d)
        throw ConfigError("make_classical_grid: domain must be a box of dimension d");
    ClassicalGrid g;
    g.J = J;
    g.d = d;
    g.beta = beta;
    std::vector<int> nx(d, n_x);
    std::vector<double> lox(d), hix(d);
    for (int c = 0; c < d; ++c) {
        lox[c] = omega.lo[c];
        hix[c] = omega.hi[c];
    }
    g.x = RGrid(nx, lox, hix);
    ConfigurationDomain conf(omega);
    const int QD = J * d;
    std::vector<int> nq(QD, n_q);
    std::vector<double> loq(QD), hiq(QD);
    for (int k = 0; k < QD; ++k) {
        loq[k] = conf.domain.lo[k % d];
        hiq[k] = conf.domain.hi[k % d];
    }
    g.q = RGrid(nq, loq, hiq);
    return g;
}

std::vector<double> classical_fp_rhs(
    const ClassicalGrid& g, const std::vector<double>& psi,
    const std::function<void(const double* x, double* u)>& u_fn,
    const std::function<void(const double* x, double* grad)>& gradu_fn) {
    const int J = g.J, d = g.d;
    const int QD = J * d, XD = d;
    const std::size_t NX = g.x.cells(), NQ = g.q.cells();
    if (psi.size() != NX * NQ) throw GridMismatch("classical_fp_rhs: state size");
    const RouseStructure rouse = build_rouse(J);

    std::vector<double> out(psi.size(), 0.0);

    // Configuration Maxwellian ratio tables: Mfg at q-cell centers and faces,
    // separable per scalar q dimension (prefactors cancel in the ratio form).
    const int nq = g.q.n[0];
    std::vector<std::vector<double>> mc(QD), mf(QD);
    for (int k = 0; k < QD; ++k) {
        mc[k].resize(nq);
        mf[k].resize(nq + 1);
        for (int i = 0; i < nq; ++i) {
            const double q = g.q.center(k, i);
            mc[k][i] = std::exp(-0.5 * q * q / g.beta);
        }
        for (int i = 0; i <= nq; ++i) {
            const double q = g.q.face(k, i);
            mf[k][i] = std::exp(-0.5 * q * q / g.beta);
        }
    }

    std::vector<std::size_t> qstride(QD, 1);
    for (int k = QD - 2; k >= 0; --k)
        qstride[k] = qstride[k + 1] * static_cast<std::size_t>(nq);
    std::vector<std::size_t> xstride(XD, 1);
    for (int k = XD - 2; k >= 0; --k)
        xstride[k] = xstride[k + 1] * static_cast<std::size_t>(g.x.n[k + 1]);

    std::vector<int> qi(QD), xi(XD);
    std::vector<double> xc(XD), u(XD), grad(static_cast<std::size_t>(d) * d);
    std::vector<double> mq(NQ);  // full configuration Maxwellian per q-cell
    for (std::size_t cq = 0; cq < NQ; ++cq) {
        g.q.unflatten(cq, qi.data());
        double m = 1.0;
        for (int k = 0; k < QD; ++k) m *= mc[k][qi[k]];
        mq[cq] = m;
    }

    for (std::size_t cx = 0; cx < NX; ++cx) {
        g.x.unflatten(cx, xi.data());
        for (int c = 0; c < XD; ++c) xc[c] = g.x.center(c, xi[c]);
        u_fn(xc.data(), u.data());
        gradu_fn(xc.data(), grad.data());
        const std::size_t base = cx * NQ;

        // x-advection (centered differences, mirrored ghosts for the
        // zero-normal-gradient walls) and centre-of-mass diffusion.
        for (int c = 0; c < XD; ++c) {
            const int m = g.x.n[c];
            const int ic = xi[c];
            const double h = g.x.h[c];
            const std::size_t sp = xstride[c] * NQ;
            for (std::size_t cq = 0; cq < NQ; ++cq) {
                const std::size_t id = base + cq;
                const double pc = psi[id];
                const double pp = (ic + 1 < m) ? psi[id + sp] : pc;  // mirror ghost
                const double pm = (ic > 0) ? psi[id - sp] : pc;
                out[id] += -u[c] * (pp - pm) / (2.0 * h) +
                           (g.beta / (J + 1)) * (pp - 2.0 * pc + pm) / (h * h);
            }
        }

        // q-part: conservative fluxes at interior q-faces (walls carry none).
        // Physical flux along dimension k = (j,c):
        //   Phi = (grad_u q_j)_c psi - beta sum_i R_ij Mfg d/dq_ic (psi/Mfg),
        // and the cell update is dpsi/dt -= dPhi/dq_k.
        for (int j = 0; j < J; ++j) {
            for (int c = 0; c < d; ++c) {
                const int k = j * d + c;  // flux dimension
                const double h = g.q.h[k];
                const std::size_t st = qstride[k];
                for (std::size_t cq = 0; cq < NQ; ++cq) {
                    g.q.unflatten(cq, qi.data());
                    if (qi[k] == nq - 1) continue;
                    const std::size_t cl = base + cq;
                    const std::size_t cr = cl + st;
                    const double qface = g.q.face(k, qi[k] + 1);
                    // transverse Maxwell factors agree on both sides of the
                    // face, so the face Maxwellian is exact:
                    const double mface = mq[cq] / mc[k][qi[k]] * mf[k][qi[k] + 1];
                    double diff = 0.0;
                    for (int i2 = 0; i2 < J; ++i2) {
                        const int rij = rouse.r_at(i2, j);
                        if (rij == 0) continue;
                        const int ki = i2 * d + c;
                        if (ki == k) {
                            const double wl = psi[cl] / mq[cq];
                            const double wr = psi[cr] / mq[cq + st];
                            diff += rij * (wr - wl) / h;
                        } else {
                            // transverse derivative of the ratio, averaged
                            // from the two cells sharing the face
                            const std::size_t sti = qstride[ki];
                            const int ii = qi[ki];
                            const int mi = g.q.n[ki];
                            auto dratio = [&](std::size_t cell, std::size_t cqi) {
                                const double w0 = psi[cell] / mq[cqi];
                                const double wp = (ii + 1 < mi)
                                                      ? psi[cell + sti] / mq[cqi + sti]
                                                      : w0;
                                const double wm =
                                    (ii > 0) ? psi[cell - sti] / mq[cqi - sti] : w0;
                                return (wp - wm) / (2.0 * g.q.h[ki]);
                            };
                            diff += rij * 0.5 * (dratio(cl, cq) + dratio(cr, cq + st));
                        }
                    }
                    double drift = 0.0;
                    for (int c2 = 0; c2 < d; ++c2) {
                        const double qval =
                            (c2 == c) ? qface : g.q.center(j * d + c2, qi[j * d + c2]);
                        drift += grad[c * d + c2] * qval;
                    }
                    const double phi =
                        drift * 0.5 * (psi[cl] + psi[cr]) - g.beta * mface * diff;
                    out[cl] -= phi / h;
                    out[cr] += phi / h;
                }
            }
        }
    }
    return out;
}

std::vector<double> integrate_q(const ClassicalGrid& g, const std::vector<double>& f) {
    const std::size_t NX = g.x.cells(), NQ = g.q.cells();
    std::vector<double> out(NX, 0.0);
    const double vq = g.q.cell_volume();
    for (std::size_t cx = 0; cx < NX; ++cx) {
        double acc = 0.0;
        const double* row = f.data() + cx * NQ;
        for (std::size_t cq = 0; cq < NQ; ++cq) acc += row[cq];
        out[cx] = acc * vq;
    }
    return out;
}

double velocity_marginal_l1(const std::vector<double>& hist, double vmax, double beta) {
    const int nb = static_cast<int>(hist.size());
    const double h = 2.0 * vmax / nb;
    const double inv = 1.0 / std::sqrt(2.0 * beta);
    double acc = 0.0;
    for (int i = 0; i < nb; ++i) {
        const double a = -vmax + i * h;
        const double b = a + h;
        const double mass = 0.5 * (std::erf(b * inv) - std::erf(a * inv));
        acc += std::fabs(hist[i] * h - mass);
    }
    return acc;
}

double second_moment_deviation(const MomentField& m, double beta) {
    const int P = m.P;
    double acc = 0.0;
    for (std::size_t b = 0; b < m.grid.cells(); ++b) {
        if (m.count[b] == 0) continue;
        double s = 0.0;
        for (int k = 0; k < P; ++k)
            for (int l = 0; l < P; ++l) {
                const double dev =
                    m.second[(b * P + k) * P + l] - (k == l ? beta : 0.0);
                s += dev * dev;
            }
        acc += m.rhobar[b] * std::sqrt(s);
    }
    return acc;
}

double second_moment_deviation_debiased(const MomentField& a, const MomentField& b,
                                        double beta) {
    if (!a.grid.same_layout(b.grid) || a.P != b.P)
        throw GridMismatch("second_moment_deviation_debiased: grids differ");
    const int P = a.P;
    double acc = 0.0;
    for (std::size_t c = 0; c < a.grid.cells(); ++c) {
        if (a.count[c] == 0 || b.count[c] == 0) continue;
        double cross = 0.0;
        for (int k = 0; k < P; ++k)
            for (int l = 0; l < P; ++l) {
                const double da = a.second[(c * P + k) * P + l] - (k == l ? beta : 0.0);
                const double db = b.second[(c * P + k) * P + l] - (k == l ? beta : 0.0);
                cross += da * db;
            }
        const double w = 0.5 * (a.rhobar[c] + b.rhobar[c]);
        acc += w * std::sqrt(std::max(cross, 0.0));
    }
    return acc;
}

double spatial_l1_distance(const RGrid& grid, const std::vector<double>& bin_mass,
                           const std::vector<double>& density) {
    if (bin_mass.size() != grid.cells() || density.size() != grid.cells())
        throw GridMismatch("spatial_l1_distance: size mismatch");
    const double vol = grid.cell_volume();
    double acc = 0.0;
    for (std::size_t c = 0; c < grid.cells(); ++c)
        acc += std::fabs(bin_mass[c] - density[c] * vol);
    return acc;
}

}  // namespace mkv
