#include "mkv/fokker_planck.hpp"

#include <cmath>
#include <cstring>

#include "mkv/chain.hpp"
#include "mkv/kernels.hpp"
#include "mkv/log.hpp"

namespace mkv {

double entropy_integrand(double s) {
    if (s <= 0.0) return 1.0;
    return s * (std::log(s) - 1.0) + 1.0;
}

FpSolver::FpSolver(const FpParams& params, const PhaseGridSpec& grid, double alpha,
                   Splitting splitting)
    : p_(params), spec_(grid), alpha_(alpha), splitting_(splitting) {
    if (p_.n_beads < 1) throw ConfigError("FpSolver: need at least one bead");
    if (p_.d < 1 || p_.d > 3) throw ConfigError("FpSolver: d must be in {1,2,3}");
    if (!(p_.eps > 0.0) || !(p_.beta > 0.0))
        throw ConfigError("FpSolver: eps and beta must be positive");
    if (grid.omega.kind != ConvexDomain::Kind::box || grid.omega.dim != p_.d)
        throw ConfigError("FpSolver: flow domain must be a box of dimension d");
    if (grid.n_v < 8) throw GridTooCoarse("FpSolver: n_v must be at least 8");
    if (grid.n_v % 2 != 0) throw ConfigError("FpSolver: n_v must be even");
    if (grid.n_r < 2) throw GridTooCoarse("FpSolver: n_r must be at least 2");
    if (!(grid.v_max >= 6.0 * std::sqrt(p_.beta)))
        throw ConfigError("FpSolver: v_max must cover 6 sqrt(beta)");
    if (alpha_ < 0.0) throw ConfigError("FpSolver: alpha must be nonnegative");

    const int P = p_.P();
    std::vector<int> nr(P, grid.n_r);
    std::vector<double> lo(P), hi(P);
    for (int k = 0; k < P; ++k) {
        const int c = k % p_.d;
        lo[k] = grid.omega.lo[c];
        hi[k] = grid.omega.hi[c];
    }
    rgrid_ = RGrid(nr, lo, hi);

    nv_ = grid.n_v;
    vmax_ = grid.v_max;
    hv_ = 2.0 * vmax_ / nv_;

    NR_ = rgrid_.cells();
    NV_ = 1;
    for (int k = 0; k < P; ++k) NV_ *= static_cast<std::size_t>(nv_);
    vol_ = rgrid_.cell_volume() * std::pow(hv_, P);

    rho_.assign(NR_ * NV_, 0.0);
    build_tables();
}

void FpSolver::build_tables() {
    const int P = p_.P();
    const double beta = p_.beta;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * beta);

    gc_.resize(nv_);
    gf_.resize(nv_ + 1);
    vtil_.resize(nv_);
    for (int i = 0; i < nv_; ++i)
        gc_[i] = norm * std::exp(-0.5 * v_center(i) * v_center(i) / beta);
    for (int i = 0; i <= nv_; ++i) {
        const double vf = -vmax_ + i * hv_;
        gf_[i] = norm * std::exp(-0.5 * vf * vf / beta);
    }
    // The truncation walls carry no flux, so the transport velocity is
    // derived from face weights that vanish there; this keeps the discrete
    // equilibrium exact up to the outermost velocity cells.
    for (int i = 0; i < nv_; ++i) {
        const double gl = (i == 0) ? 0.0 : gf_[i];
        const double gr = (i + 1 == nv_) ? 0.0 : gf_[i + 1];
        vtil_[i] = -beta * (gr - gl) / (hv_ * gc_[i]);
    }

    // strides
    rstride_.assign(P, 1);
    vstride_.assign(P, 1);
    for (int k = P - 2; k >= 0; --k) {
        rstride_[k] = rstride_[k + 1] * static_cast<std::size_t>(rgrid_.n[k + 1]);
        vstride_[k] = vstride_[k + 1] * static_cast<std::size_t>(nv_);
    }

    // full Maxwellian per velocity multi-index
    Mv_.assign(NV_, 1.0);
    ivk_.assign(P, std::vector<int>(NV_));
    for (std::size_t vf = 0; vf < NV_; ++vf) {
        std::size_t rem = vf;
        for (int k = P - 1; k >= 0; --k) {
            const int iv = static_cast<int>(rem % static_cast<std::size_t>(nv_));
            rem /= static_cast<std::size_t>(nv_);
            ivk_[k][vf] = iv;
            Mv_[vf] *= gc_[iv];
        }
    }

    // Gibbs weight at r-cells
    const int nb = p_.n_beads;
    const int d = p_.d;
    G_.resize(NR_);
    std::vector<int> idx(P);
    std::vector<double> rpos(P);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        rgrid_.unflatten(rf, idx.data());
        for (int k = 0; k < P; ++k) rpos[k] = rgrid_.center(k, idx[k]);
        G_[rf] = std::exp(-chain_potential(rpos.data(), nb, d) / beta);
    }

    // line bases and face Gibbs weights per r-dimension
    rlines_.assign(P, {});
    Gface_.assign(P, {});
    atil_.assign(P, std::vector<double>(NR_));
    const int nr = rgrid_.n[0];
    for (int k = 0; k < P; ++k) {
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            if ((rf / rstride_[k]) % static_cast<std::size_t>(nr) == 0)
                rlines_[k].push_back(rf);
        }
        Gface_[k].resize(rlines_[k].size() * static_cast<std::size_t>(nr + 1));
        for (std::size_t ln = 0; ln < rlines_[k].size(); ++ln) {
            rgrid_.unflatten(rlines_[k][ln], idx.data());
            for (int q = 0; q < P; ++q) rpos[q] = rgrid_.center(q, idx[q]);
            for (int i = 0; i <= nr; ++i) {
                rpos[k] = rgrid_.face(k, i);
                Gface_[k][ln * (nr + 1) + i] =
                    std::exp(-chain_potential(rpos.data(), nb, d) / beta);
            }
            for (int i = 0; i < nr; ++i) {
                const std::size_t rf = rlines_[k][ln] + i * rstride_[k];
                atil_[k][rf] = beta *
                               (Gface_[k][ln * (nr + 1) + i + 1] -
                                Gface_[k][ln * (nr + 1) + i]) /
                               (rgrid_.h[k] * G_[rf]);
            }
        }
    }
}

void FpSolver::bead_position(std::size_t rf, int bead, double* pos) const {
    const int d = p_.d;
    std::vector<int> idx(p_.P());
    rgrid_.unflatten(rf, idx.data());
    for (int c = 0; c < d; ++c) pos[c] = rgrid_.center(bead * d + c, idx[bead * d + c]);
}

void FpSolver::set_uniform() {
    std::fill(rho_.begin(), rho_.end(), 1.0);
    normalize_mass();
}

void FpSolver::set_gibbs() {
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double g = G_[rf];
        double* row = rho_.data() + rf * NV_;
        for (std::size_t vf = 0; vf < NV_; ++vf) row[vf] = g;
    }
    normalize_mass();
}

void FpSolver::set_density(
    const std::function<double(const double* r, const double* v)>& f) {
    const int P = p_.P();
    std::vector<int> idx(P);
    std::vector<double> rpos(P), vpos(P);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        rgrid_.unflatten(rf, idx.data());
        for (int k = 0; k < P; ++k) rpos[k] = rgrid_.center(k, idx[k]);
        double* row = rho_.data() + rf * NV_;
        for (std::size_t vf = 0; vf < NV_; ++vf) {
            for (int k = 0; k < P; ++k) vpos[k] = v_center(ivk_[k][vf]);
            const double val = f(rpos.data(), vpos.data());
            if (val < 0.0) throw ConfigError("FpSolver: initial density must be >= 0");
            row[vf] = val;
        }
    }
    normalize_mass();
}

void FpSolver::normalize_mass() {
    const double m = mass();
    if (!(m > 0.0)) throw ConfigError("FpSolver: zero-mass initial state");
    const double s = 1.0 / m;
    for (double& x : rho_) x *= s;
}

double FpSolver::mass() const {
    double acc = 0.0;
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double* row = rho_.data() + rf * NV_;
        acc += kernels::ops().weighted_sum(Mv_.data(), row, NV_);
    }
    return acc * vol_;
}

double FpSolver::min_density() const {
    return kernels::ops().min_val(rho_.data(), rho_.size());
}

void FpSolver::drift_coefficients(int k, const VelocitySampler* u,
                                  std::vector<double>& out) const {
    out.assign(NR_, 0.0);
    for (std::size_t rf = 0; rf < NR_; ++rf) out[rf] = atil_[k][rf];
    if (u) {
        const int bead = k / p_.d;
        const int comp = k % p_.d;
        double pos[3], uval[3];
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            bead_position(rf, bead, pos);
            u->eval(pos, t_, uval);
            out[rf] += uval[comp];
        }
    }
}

void FpSolver::accumulate_transport(const std::vector<double>& w,
                                    const VelocitySampler* u,
                                    std::vector<double>& acc) const {
    const int P = p_.P();
    const int nr = rgrid_.n[0];
    const double inv_eps = 1.0 / p_.eps;

    // r-transport with specular wall pairing
    for (int k = 0; k < P; ++k) {
        const double hr = rgrid_.h[k];
        const std::size_t rs = rstride_[k];
        const std::size_t vs = vstride_[k];
        const std::vector<int>& ivk = ivk_[k];
        for (std::size_t ln = 0; ln < rlines_[k].size(); ++ln) {
            const std::size_t base = rlines_[k][ln];
            const double* Gf_line = Gface_[k].data() + ln * (nr + 1);
            for (int i = 0; i <= nr; ++i) {
                const double Gf = Gf_line[i];
                const bool has_left = i > 0;
                const bool has_right = i < nr;
                const std::size_t cl = base + (has_left ? (i - 1) * rs : 0);
                const std::size_t cr = base + (has_right ? i * rs : 0);
                const double* wl = w.data() + cl * NV_;
                const double* wr = w.data() + cr * NV_;
                double* al = acc.data() + cl * NV_;
                double* ar = acc.data() + cr * NV_;
                for (std::size_t vf = 0; vf < NV_; ++vf) {
                    const int iv = ivk[vf];
                    const double vt = vtil_[iv];
                    const double coeff = inv_eps * vt * Mv_[vf] * Gf;
                    double wup;
                    const std::ptrdiff_t mshift =
                        static_cast<std::ptrdiff_t>(nv_ - 1 - 2 * iv) *
                        static_cast<std::ptrdiff_t>(vs);
                    if (has_left && has_right) {
                        wup = vt > 0.0 ? wl[vf] : wr[vf];
                    } else if (!has_left) {
                        // left wall: inflow (vt > 0) takes the mirrored
                        // interior value, outflow the interior value
                        wup = vt > 0.0 ? wr[static_cast<std::ptrdiff_t>(vf) + mshift]
                                       : wr[vf];
                    } else {
                        wup = vt > 0.0 ? wl[vf]
                                       : wl[static_cast<std::ptrdiff_t>(vf) + mshift];
                    }
                    const double F = coeff * wup / hr;
                    if (has_left) al[vf] -= F;
                    if (has_right) ar[vf] += F;
                }
            }
        }
    }

    // v-drift with zero flux at the truncation boundary
    std::vector<double> A;
    for (int k = 0; k < P; ++k) {
        drift_coefficients(k, u, A);
        const std::size_t vs = vstride_[k];
        const std::vector<int>& ivk = ivk_[k];
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            const double a = A[rf];
            if (a == 0.0) continue;
            const double coeff0 = inv_eps * a * G_[rf] / hv_;
            const double* wrow = w.data() + rf * NV_;
            double* arow = acc.data() + rf * NV_;
            for (std::size_t vf = 0; vf < NV_; ++vf) {
                const int iv = ivk[vf];
                if (iv == nv_ - 1) continue;  // face above the last cell: zero flux
                // face between iv and iv+1 of dimension k
                const std::size_t vup = vf + vs;
                const double Mf = Mv_[vf] / gc_[iv] * gf_[iv + 1];
                const double wup = a > 0.0 ? wrow[vf] : wrow[vup];
                const double F = coeff0 * Mf * wup;
                arow[vf] -= F;
                arow[vup] += F;
            }
        }
    }
}

void FpSolver::accumulate_alpha(const std::vector<double>& rho,
                                std::vector<double>& acc) const {
    if (alpha_ == 0.0) return;
    const int P = p_.P();
    const int nr = rgrid_.n[0];
    for (int k = 0; k < P; ++k) {
        const double c0 = alpha_ / (rgrid_.h[k] * rgrid_.h[k]);
        const std::size_t rs = rstride_[k];
        for (std::size_t ln = 0; ln < rlines_[k].size(); ++ln) {
            const std::size_t base = rlines_[k][ln];
            for (int i = 0; i + 1 < nr; ++i) {
                const std::size_t cl = base + i * rs;
                const std::size_t cr = cl + rs;
                const double* rl = rho.data() + cl * NV_;
                const double* rr = rho.data() + cr * NV_;
                double* al = acc.data() + cl * NV_;
                double* ar = acc.data() + cr * NV_;
                for (std::size_t vf = 0; vf < NV_; ++vf) {
                    const double F = c0 * Mv_[vf] * (rr[vf] - rl[vf]);
                    al[vf] += F;
                    ar[vf] -= F;
                }
            }
        }
    }
}

double FpSolver::stable_dt(const VelocitySampler* u) const {
    const int P = p_.P();
    const int nr = rgrid_.n[0];
    double vt_max = 0.0;
    for (int i = 0; i < nv_; ++i) vt_max = std::max(vt_max, std::fabs(vtil_[i]));
    double gf_ratio = 0.0;
    for (int i = 0; i < nv_; ++i)
        gf_ratio = std::max(gf_ratio, std::max(gf_[i], gf_[i + 1]) / gc_[i]);

    double rate = 0.0;
    std::vector<double> A;
    std::vector<std::vector<double>> drift(P);
    for (int k = 0; k < P; ++k) drift_coefficients(k, u, drift[k]);
    for (int k = 0; k < P; ++k) {
        const std::size_t rs = rstride_[k];
        for (std::size_t ln = 0; ln < rlines_[k].size(); ++ln) {
            const std::size_t base = rlines_[k][ln];
            const double* Gf_line = Gface_[k].data() + ln * (nr + 1);
            for (int i = 0; i < nr; ++i) {
                const std::size_t rf = base + i * rs;
                const double gmax = std::max(Gf_line[i], Gf_line[i + 1]) / G_[rf];
                double cell_rate = vt_max * gmax / rgrid_.h[k] / p_.eps;
                cell_rate += std::fabs(drift[k][rf]) * gf_ratio / hv_ / p_.eps;
                if (alpha_ > 0.0)
                    cell_rate += 2.0 * alpha_ / (rgrid_.h[k] * rgrid_.h[k]);
                rate = std::max(rate, cell_rate);
            }
        }
    }
    // rate bounds the per-dimension contribution from its own faces; the
    // explicit substep sums over dimensions, hence the P factor.
    const double sub = 0.95 / (rate * P);
    return splitting_ == Splitting::strang ? 2.0 * sub : sub;
}

void FpSolver::explicit_substep(double dt, const VelocitySampler* u) {
    scratch_w_.resize(rho_.size());
    scratch_acc_.assign(rho_.size(), 0.0);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double inv_g = 1.0 / G_[rf];
        const double* row = rho_.data() + rf * NV_;
        double* wrow = scratch_w_.data() + rf * NV_;
        for (std::size_t vf = 0; vf < NV_; ++vf) wrow[vf] = row[vf] * inv_g;
    }
    accumulate_transport(scratch_w_, u, scratch_acc_);
    accumulate_alpha(rho_, scratch_acc_);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        double* row = rho_.data() + rf * NV_;
        const double* arow = scratch_acc_.data() + rf * NV_;
        for (std::size_t vf = 0; vf < NV_; ++vf) row[vf] += dt * arow[vf] / Mv_[vf];
    }
}

void FpSolver::implicit_diffusion_dim(int k, double dt) {
    // Tridiagonal coefficients depend only on the velocity index along k.
    const double kap = p_.beta * p_.beta / (p_.eps * p_.eps) / (hv_ * hv_);
    std::vector<double> sub(nv_), diag(nv_), sup(nv_);
    for (int i = 0; i < nv_; ++i) {
        const double af = (i > 0) ? kap * gf_[i] / gc_[i] : 0.0;
        const double cf = (i + 1 < nv_) ? kap * gf_[i + 1] / gc_[i] : 0.0;
        sub[i] = -dt * af;
        diag[i] = 1.0 + dt * (af + cf);
        sup[i] = -dt * cf;
    }
    // Thomas factorization (shared by every line of this dimension).
    std::vector<double> cp(nv_), denom(nv_);
    denom[0] = diag[0];
    cp[0] = sup[0] / denom[0];
    for (int i = 1; i < nv_; ++i) {
        denom[i] = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / denom[i];
    }

    const std::size_t vs = vstride_[k];
    std::vector<double> line(nv_);
    const std::size_t lines_per_r = NV_ / static_cast<std::size_t>(nv_);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        double* row = rho_.data() + rf * NV_;
        for (std::size_t lb = 0; lb < lines_per_r; ++lb) {
            // base offset of this v-line: enumerate all v_flat with iv_k == 0
            const std::size_t low = lb % vs;
            const std::size_t high = lb / vs;
            const std::size_t base = high * vs * static_cast<std::size_t>(nv_) + low;
            for (int i = 0; i < nv_; ++i) line[i] = row[base + i * vs];
            line[0] = line[0] / denom[0];
            for (int i = 1; i < nv_; ++i)
                line[i] = (line[i] - sub[i] * line[i - 1]) / denom[i];
            for (int i = nv_ - 2; i >= 0; --i) line[i] -= cp[i] * line[i + 1];
            for (int i = 0; i < nv_; ++i) row[base + i * vs] = line[i];
        }
    }
}

FpStepLog FpSolver::step(double dt, const VelocitySampler* u) {
    if (!(dt > 0.0)) throw ConfigError("FpSolver::step: dt must be positive");
    const double limit = stable_dt(u);
    if (dt > limit * 1.0000001)
        throw StabilityViolation("FpSolver::step: dt exceeds the explicit bound");

    const int P = p_.P();
    if (splitting_ == Splitting::strang) {
        explicit_substep(0.5 * dt, u);
        if (P == 1) {
            implicit_diffusion_dim(0, dt);
        } else {
            for (int k = 0; k < P - 1; ++k) implicit_diffusion_dim(k, 0.5 * dt);
            implicit_diffusion_dim(P - 1, dt);
            for (int k = P - 2; k >= 0; --k) implicit_diffusion_dim(k, 0.5 * dt);
        }
        explicit_substep(0.5 * dt, u);
    } else {
        explicit_substep(dt, u);
        for (int k = 0; k < P; ++k) implicit_diffusion_dim(k, dt);
    }
    t_ += dt;

    // Negativity guard: the scheme is monotone, so anything below the
    // tolerance indicates a configuration error rather than round-off.
    FpStepLog log;
    const double mn = min_density();
    if (mn < -1e-12)
        throw StabilityViolation("FpSolver::step: density dropped below -1e-12");
    if (mn < 0.0) {
        double removed = 0.0;
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            double* row = rho_.data() + rf * NV_;
            for (std::size_t vf = 0; vf < NV_; ++vf) {
                if (row[vf] < 0.0) {
                    removed -= row[vf] * Mv_[vf];
                    row[vf] = 0.0;
                    ++log.clipped_cells;
                }
            }
        }
        log.clipped_mass = removed * vol_;
        if (log.clipped_cells > 0) {
            normalize_mass();
            log::debug("fp step clipped %ld cells (mass %.3e)", log.clipped_cells,
                       log.clipped_mass);
        }
    }
    return log;
}

void FpSolver::apply_operator(const std::vector<double>& rho, const VelocitySampler* u,
                              std::vector<double>& out) const {
    if (rho.size() != rho_.size())
        throw GridMismatch("apply_operator: state size mismatch");
    std::vector<double> w(rho.size());
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double inv_g = 1.0 / G_[rf];
        for (std::size_t vf = 0; vf < NV_; ++vf)
            w[rf * NV_ + vf] = rho[rf * NV_ + vf] * inv_g;
    }
    std::vector<double> acc(rho.size(), 0.0);
    accumulate_transport(w, u, acc);
    accumulate_alpha(rho, acc);
    std::vector<double> diff;
    apply_diffusion(rho, diff);
    out.assign(rho.size(), 0.0);
    for (std::size_t rf = 0; rf < NR_; ++rf)
        for (std::size_t vf = 0; vf < NV_; ++vf)
            out[rf * NV_ + vf] = acc[rf * NV_ + vf] / Mv_[vf] + diff[rf * NV_ + vf];
}

void FpSolver::apply_diffusion(const std::vector<double>& rho,
                               std::vector<double>& out) const {
    if (rho.size() != rho_.size())
        throw GridMismatch("apply_diffusion: state size mismatch");
    out.assign(rho.size(), 0.0);
    const int P = p_.P();
    const double kap = p_.beta * p_.beta / (p_.eps * p_.eps) / (hv_ * hv_);
    for (int k = 0; k < P; ++k) {
        const std::size_t vs = vstride_[k];
        const std::vector<int>& ivk = ivk_[k];
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            const double* row = rho.data() + rf * NV_;
            double* orow = out.data() + rf * NV_;
            for (std::size_t vf = 0; vf < NV_; ++vf) {
                const int iv = ivk[vf];
                if (iv == nv_ - 1) continue;
                const double F = kap * gf_[iv + 1] * (row[vf + vs] - row[vf]);
                orow[vf] += F / gc_[iv];
                orow[vf + vs] -= F / gc_[iv + 1];
            }
        }
    }
}

double FpSolver::relative_entropy() const {
    double acc = 0.0;
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double* row = rho_.data() + rf * NV_;
        for (std::size_t vf = 0; vf < NV_; ++vf)
            acc += Mv_[vf] * entropy_integrand(row[vf]);
    }
    return acc * vol_;
}

double FpSolver::gibbs_relative_entropy() const {
    // pi = M G / Z; entropy = sum pi F(rho M / pi) = sum pi F(Z w).
    double Z = 0.0;
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        double m = 0.0;
        for (std::size_t vf = 0; vf < NV_; ++vf) m += Mv_[vf];
        Z += G_[rf] * m;
    }
    Z *= vol_;
    double acc = 0.0;
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double* row = rho_.data() + rf * NV_;
        const double g = G_[rf];
        for (std::size_t vf = 0; vf < NV_; ++vf)
            acc += Mv_[vf] * g * entropy_integrand(Z * row[vf] / g);
    }
    return acc * vol_ / Z;
}

double FpSolver::fisher_dissipation() const {
    const int P = p_.P();
    double acc = 0.0;
    for (int k = 0; k < P; ++k) {
        const std::size_t vs = vstride_[k];
        const std::vector<int>& ivk = ivk_[k];
        for (std::size_t rf = 0; rf < NR_; ++rf) {
            const double* row = rho_.data() + rf * NV_;
            for (std::size_t vf = 0; vf < NV_; ++vf) {
                const int iv = ivk[vf];
                double grad;
                if (iv == 0)
                    grad = (row[vf + vs] - row[vf]) / hv_;
                else if (iv == nv_ - 1)
                    grad = (row[vf] - row[vf - vs]) / hv_;
                else
                    grad = (row[vf + vs] - row[vf - vs]) / (2.0 * hv_);
                acc += Mv_[vf] * grad * grad / std::max(row[vf], 1e-30);
            }
        }
    }
    return acc * vol_;
}

FpSolver::Moments FpSolver::moments() const {
    const int P = p_.P();
    Moments m;
    m.grid = rgrid_;
    m.P = P;
    m.rhobar.assign(NR_, 0.0);
    m.current.assign(NR_ * P, 0.0);
    m.second.assign(NR_ * P * P, 0.0);
    const double dv = std::pow(hv_, P);
    std::vector<double> vc(P);
    for (std::size_t rf = 0; rf < NR_; ++rf) {
        const double* row = rho_.data() + rf * NV_;
        double rb = 0.0;
        for (std::size_t vf = 0; vf < NV_; ++vf) {
            const double wgt = Mv_[vf] * row[vf];
            rb += wgt;
            for (int k = 0; k < P; ++k) vc[k] = v_center(ivk_[k][vf]);
            for (int k = 0; k < P; ++k) {
                m.current[rf * P + k] += wgt * vc[k];
                for (int l = 0; l < P; ++l)
                    m.second[(rf * P + k) * P + l] += wgt * vc[k] * vc[l];
            }
        }
        m.rhobar[rf] = rb * dv;
        for (int k = 0; k < P; ++k) m.current[rf * P + k] *= dv / p_.eps;
        for (int k = 0; k < P * P; ++k) m.second[rf * P * P + k] *= dv;
    }
    return m;
}

double FpSolver::maxwellian(const int* iv) const {
    double m = 1.0;
    for (int k = 0; k < p_.P(); ++k) m *= gc_[iv[k]];
    return m;
}

EnergyInequalityReport check_energy_inequality(const std::vector<EnergyLogEntry>& log,
                                               const FpParams& p, double L,
                                               double round_off_budget) {
    EnergyInequalityReport rep;
    if (log.empty()) return rep;
    const double beta = p.beta;
    const double e0 = log.front().entropy;
    const double fac = beta * beta / (2.0 * p.eps * p.eps);
    double fisher_int = 0.0;
    double u_int = 0.0;
    rep.lhs.resize(log.size());
    rep.rhs.resize(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (i > 0) {
            const double dt = log[i].t - log[i - 1].t;
            fisher_int += 0.5 * dt * (log[i].fisher + log[i - 1].fisher);
            u_int += 0.5 * dt *
                     (log[i].u_sup * log[i].u_sup + log[i - 1].u_sup * log[i - 1].u_sup);
        }
        const double t = log[i].t - log.front().t;
        rep.lhs[i] = log[i].entropy + fac * fisher_int;
        rep.rhs[i] = e0 + (16.0 / beta) * p.n_beads * p.d * L * L * t +
                     (1.0 / beta) * p.n_beads * u_int;
        if (rep.lhs[i] > rep.rhs[i]) rep.bound_holds = false;
        if (i > 0) {
            const double inc = log[i].gibbs_entropy - log[i - 1].gibbs_entropy;
            const double budget =
                round_off_budget * std::max(1.0, std::fabs(log[i - 1].gibbs_entropy));
            rep.max_gibbs_entropy_increase =
                std::max(rep.max_gibbs_entropy_increase, inc);
            if (inc > budget) rep.gibbs_entropy_monotone = false;
        }
    }
    return rep;
}

}  // namespace mkv
