#include "mkv/chain.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "mkv/kernels.hpp"
#include "mkv/log.hpp"

namespace mkv {

void ChainParams::validate() const {
    if (J < 1) throw ConfigError("ChainParams: J must be >= 1");
    if (d < 1 || d > 3) throw ConfigError("ChainParams: d must be in {1,2,3}");
    if (!(eps > 0.0)) throw ConfigError("ChainParams: eps must be positive");
    if (!(beta > 0.0)) throw ConfigError("ChainParams: beta must be positive");
    if (!(H > 0.0)) throw ConfigError("ChainParams: H must be positive");
}

void connectivity_apply(const double* r, double* out, int n_beads, int d) {
    using kernels::ops;
    const std::size_t nd = static_cast<std::size_t>(d);
    if (n_beads == 1) {
        for (int c = 0; c < d; ++c) out[c] = 0.0;
        return;
    }
    // First and last rows: nearest-neighbour difference; interior rows:
    // second difference. Executed with the same kernel sequence as the
    // ensemble stepper so single-chain and ensemble paths agree bitwise.
    ops().scale_add(1.0, r + nd, -1.0, r, out, nd);
    for (int j = 1; j + 1 < n_beads; ++j) {
        double* oj = out + j * nd;
        ops().scale_add(1.0, r + (j - 1) * nd, -2.0, r + j * nd, oj, nd);
        ops().axpy(1.0, r + (j + 1) * nd, oj, nd);
    }
    ops().scale_add(1.0, r + (n_beads - 2) * nd, -1.0, r + (n_beads - 1) * nd,
                    out + (n_beads - 1) * nd, nd);
}

double chain_potential(const double* r, int n_beads, int d) {
    double V = 0.0;
    for (int j = 0; j + 1 < n_beads; ++j) {
        for (int c = 0; c < d; ++c) {
            const double q = r[(j + 1) * d + c] - r[j * d + c];
            V += 0.5 * q * q;
        }
    }
    return V;
}

Ensemble::Ensemble(std::size_t n_chains, const ChainParams& p,
                   const ConvexDomain& omega, std::uint64_t seed)
    : p_(p), omega_(omega), n_(n_chains), seed_(seed) {
    p_.validate();
    if (n_chains < 1) throw ConfigError("Ensemble: need at least one chain");
    if (omega.dim != p.d) throw ConfigError("Ensemble: domain dim != chain d");
    const std::size_t dof = static_cast<std::size_t>(p_.n_dof());
    r_.assign(dof * n_, 0.0);
    v_.assign(dof * n_, 0.0);
    rngs_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) rngs_.emplace_back(seed, i);
}

void Ensemble::get_chain(std::size_t i, double* r, double* v) const {
    const int dof = p_.n_dof();
    for (int k = 0; k < dof; ++k) {
        r[k] = r_comp(k)[i];
        if (v) v[k] = v_comp(k)[i];
    }
}

void Ensemble::set_chain(std::size_t i, const double* r, const double* v) {
    const int dof = p_.n_dof();
    for (int k = 0; k < dof; ++k) {
        r_comp(k)[i] = r[k];
        if (v) v_comp(k)[i] = v[k];
    }
}

namespace {

// Uniform sample in Omega; rejection from the bounding box for disks.
void sample_uniform_point(const ConvexDomain& omega, CounterRng& rng, double* x) {
    const int d = omega.dim;
    if (omega.kind == ConvexDomain::Kind::box) {
        for (int k = 0; k < d; ++k)
            x[k] = omega.lo[k] + rng.uniform() * (omega.hi[k] - omega.lo[k]);
        return;
    }
    for (;;) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            x[k] = (2.0 * rng.uniform() - 1.0) * omega.radius;
            s += x[k] * x[k];
        }
        if (s <= omega.radius * omega.radius) return;
    }
}

}  // namespace

void Ensemble::init_positions_uniform() {
    const int nb = p_.n_beads();
    const int d = p_.d;
    std::vector<double> pt(3);
    for (std::size_t i = 0; i < n_; ++i) {
        for (int j = 0; j < nb; ++j) {
            sample_uniform_point(omega_, rngs_[i], pt.data());
            for (int c = 0; c < d; ++c) r_comp(j * d + c)[i] = pt[c];
        }
    }
}

void Ensemble::init_positions_gibbs() {
    // Gibbs density on Omega^{J+1} restricted by the walls: propose the
    // centre of mass uniformly and connectors from the free-space Gaussian,
    // accept when every bead lands inside.
    const int nb = p_.n_beads();
    const int d = p_.d;
    const int J = p_.J;
    std::vector<double> x(3), q(static_cast<std::size_t>(J) * d),
        s(static_cast<std::size_t>(nb) * d), r(static_cast<std::size_t>(nb) * d);
    const double sig = std::sqrt(p_.beta);
    for (std::size_t i = 0; i < n_; ++i) {
        for (;;) {
            sample_uniform_point(omega_, rngs_[i], x.data());
            for (int k = 0; k < J * d; ++k) q[k] = sig * rngs_[i].gaussian();
            // cumulative connector sums, centred so that mean(r) = x
            for (int c = 0; c < d; ++c) s[c] = 0.0;
            for (int j = 1; j < nb; ++j)
                for (int c = 0; c < d; ++c)
                    s[j * d + c] = s[(j - 1) * d + c] + q[(j - 1) * d + c];
            bool ok = true;
            for (int c = 0; c < d; ++c) {
                double m = 0.0;
                for (int j = 0; j < nb; ++j) m += s[j * d + c];
                m /= nb;
                for (int j = 0; j < nb; ++j) r[j * d + c] = x[c] + s[j * d + c] - m;
            }
            for (int j = 0; j < nb && ok; ++j)
                ok = omega_.signed_distance(&r[j * d]) <= 0.0;
            if (ok) {
                for (int k = 0; k < nb * d; ++k) r_comp(k)[i] = r[k];
                break;
            }
        }
    }
}

void Ensemble::init_positions_at(const double* r) {
    const int dof = p_.n_dof();
    for (int k = 0; k < dof; ++k)
        for (std::size_t i = 0; i < n_; ++i) r_comp(k)[i] = r[k];
}

void Ensemble::init_velocities_maxwellian() {
    const int dof = p_.n_dof();
    const double sig = std::sqrt(p_.beta);
    for (std::size_t i = 0; i < n_; ++i)
        for (int k = 0; k < dof; ++k) v_comp(k)[i] = sig * rngs_[i].gaussian();
}

void Ensemble::init_velocities_zero() {
    std::memset(v_.data(), 0, v_.size() * sizeof(double));
}

namespace {

struct Slice {
    std::size_t stride;   // full ensemble size (dof array stride)
    std::size_t begin;    // first chain in the slice
    std::size_t count;    // chains in the slice
    double* r;            // ensemble base pointers
    double* v;            // null for overdamped
};

// Drift = (Lr)_j + u(r_j, t) for every chain in the slice, written into
// dof-major scratch of length slice.count per dof.
void compute_drift(const Slice& s, const ChainParams& p, const VelocitySampler& u,
                   double t, bool u_is_zero, double* drift) {
    using kernels::ops;
    const int nb = p.n_beads();
    const int d = p.d;
    const std::size_t n = s.count;
    auto rk = [&](int k) { return s.r + static_cast<std::size_t>(k) * s.stride + s.begin; };
    auto dk = [&](int k) { return drift + static_cast<std::size_t>(k) * n; };

    if (nb == 1) {
        for (int c = 0; c < d; ++c) std::memset(dk(c), 0, n * sizeof(double));
    } else {
        for (int c = 0; c < d; ++c) {
            ops().scale_add(1.0, rk(d + c), -1.0, rk(c), dk(c), n);
            for (int j = 1; j + 1 < nb; ++j) {
                ops().scale_add(1.0, rk((j - 1) * d + c), -2.0, rk(j * d + c),
                                dk(j * d + c), n);
                ops().axpy(1.0, rk((j + 1) * d + c), dk(j * d + c), n);
            }
            ops().scale_add(1.0, rk((nb - 2) * d + c), -1.0, rk((nb - 1) * d + c),
                            dk((nb - 1) * d + c), n);
        }
    }

    if (!u_is_zero) {
        double pos[3], uval[3];
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < nb; ++j) {
                for (int c = 0; c < d; ++c) pos[c] = rk(j * d + c)[i];
                u.eval(pos, t, uval);
                for (int c = 0; c < d; ++c) dk(j * d + c)[i] += uval[c];
            }
        }
    }
}

void fill_noise(const Slice& s, int dof, CounterRng* rngs, double* noise) {
    const std::size_t n = s.count;
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng& rng = rngs[s.begin + i];
        for (int k = 0; k < dof; ++k) noise[static_cast<std::size_t>(k) * n + i] =
            rng.gaussian();
    }
}

long resolve_walls(const Slice& s, const ChainParams& p, const ConvexDomain& omega,
                   double pos_gain, int max_reflections) {
    // pos_gain is the coefficient that multiplied the stored velocity (or
    // drift surrogate) in the position push; p0 is reconstructed from it.
    const int nb = p.n_beads();
    const int d = p.d;
    long reflections = 0;
    double p1[3], p0[3], vb[3];
    for (std::size_t i = 0; i < s.count; ++i) {
        for (int j = 0; j < nb; ++j) {
            for (int c = 0; c < d; ++c)
                p1[c] = s.r[static_cast<std::size_t>(j * d + c) * s.stride + s.begin + i];
            if (omega.signed_distance(p1) <= 0.0) continue;
            bool has_v = s.v != nullptr;
            for (int c = 0; c < d; ++c) {
                const double vc =
                    has_v ? s.v[static_cast<std::size_t>(j * d + c) * s.stride + s.begin + i]
                          : 0.0;
                vb[c] = vc;
                p0[c] = has_v ? p1[c] - pos_gain * vc : p1[c];
            }
            if (!has_v) {
                // Overdamped path: fold from the wall inward; use the current
                // point clamped to the domain as the segment start.
                for (int c = 0; c < d; ++c) p0[c] = p1[c];
                if (omega.kind == ConvexDomain::Kind::box) {
                    for (int c = 0; c < d; ++c) {
                        p0[c] = std::min(std::max(p0[c], omega.lo[c]), omega.hi[c]);
                    }
                } else {
                    double nrm = 0.0;
                    for (int c = 0; c < d; ++c) nrm += p0[c] * p0[c];
                    nrm = std::sqrt(nrm);
                    for (int c = 0; c < d; ++c) p0[c] *= omega.radius / nrm * (1.0 - 1e-15);
                }
            }
            try {
                reflections += billiard_reflect(omega, p0, p1, has_v ? vb : nullptr,
                                                max_reflections);
            } catch (const StepRejected&) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "step rejected: chain %zu bead %d exceeded %d reflections",
                              s.begin + i, j, max_reflections);
                throw StepRejected(buf);
            }
            for (int c = 0; c < d; ++c) {
                s.r[static_cast<std::size_t>(j * d + c) * s.stride + s.begin + i] = p1[c];
                if (has_v)
                    s.v[static_cast<std::size_t>(j * d + c) * s.stride + s.begin + i] =
                        vb[c];
            }
        }
    }
    return reflections;
}

bool sampler_is_zero(const VelocitySampler& u) {
    return dynamic_cast<const ZeroVelocity*>(&u) != nullptr;
}

// Kinetic step over one slice. Buffers are caller-provided scratch of size
// dof * slice.count each.
long kinetic_slice(const Slice& s, const ChainParams& p, const ConvexDomain& omega,
                   double dt, double t, const VelocitySampler& u, bool u_zero,
                   CounterRng* rngs, int max_reflections, double* drift,
                   double* noise) {
    using kernels::ops;
    const int dof = p.n_dof();
    const std::size_t n = s.count;
    const double eps = p.eps;
    const double c1 = std::exp(-dt / (eps * eps));
    const double c2 = (1.0 - c1) * eps;
    const double c3 = std::sqrt(p.beta * (1.0 - c1 * c1));
    const double pos_gain = dt / eps;

    compute_drift(s, p, u, t, u_zero, drift);
    fill_noise(s, dof, rngs, noise);
    for (int k = 0; k < dof; ++k) {
        double* vk = s.v + static_cast<std::size_t>(k) * s.stride + s.begin;
        ops().triad(c1, vk, c2, drift + static_cast<std::size_t>(k) * n, c3,
                    noise + static_cast<std::size_t>(k) * n, n);
        double* rk = s.r + static_cast<std::size_t>(k) * s.stride + s.begin;
        ops().axpy(pos_gain, vk, rk, n);
    }
    return resolve_walls(s, p, omega, pos_gain, max_reflections);
}

long overdamped_slice(const Slice& s, const ChainParams& p, const ConvexDomain& omega,
                      double dt, double t, const VelocitySampler& u, bool u_zero,
                      CounterRng* rngs, int max_reflections, double* drift,
                      double* noise) {
    using kernels::ops;
    const int dof = p.n_dof();
    const std::size_t n = s.count;
    const double sigma = std::sqrt(2.0 * p.beta * dt);

    compute_drift(s, p, u, t, u_zero, drift);
    fill_noise(s, dof, rngs, noise);
    for (int k = 0; k < dof; ++k) {
        double* rk = s.r + static_cast<std::size_t>(k) * s.stride + s.begin;
        ops().triad(1.0, rk, dt, drift + static_cast<std::size_t>(k) * n, sigma,
                    noise + static_cast<std::size_t>(k) * n, n);
    }
    return resolve_walls(s, p, omega, 0.0, max_reflections);
}

template <typename SliceFn>
StepStats run_slices(Ensemble& e, int threads, SliceFn&& fn) {
    const std::size_t n = e.size();
    const int dof = e.params().n_dof();
    int nt = threads < 1 ? 1 : threads;
    if (static_cast<std::size_t>(nt) > n) nt = static_cast<int>(n);

    std::vector<long> refl(nt, 0);
    std::vector<std::string> errors(nt);
    auto work = [&](int w) {
        const std::size_t chunk = (n + nt - 1) / nt;
        const std::size_t b = static_cast<std::size_t>(w) * chunk;
        if (b >= n) return;
        const std::size_t cnt = std::min(chunk, n - b);
        std::vector<double> drift(static_cast<std::size_t>(dof) * cnt);
        std::vector<double> noise(static_cast<std::size_t>(dof) * cnt);
        try {
            refl[w] = fn(b, cnt, drift.data(), noise.data());
        } catch (const std::exception& ex) {
            errors[w] = ex.what();
        }
    };

    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int w = 0; w < nt; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw StepRejected(err);

    StepStats st;
    for (long v : refl) st.reflections += v;
    return st;
}

}  // namespace

StepStats step_kinetic(Ensemble& e, double dt, const VelocitySampler& u, int threads,
                       int max_reflections) {
    if (!(dt > 0.0)) throw ConfigError("step_kinetic: dt must be positive");
    const bool u_zero = sampler_is_zero(u);
    const double t = e.time();
    StepStats st = run_slices(e, threads, [&](std::size_t b, std::size_t cnt,
                                              double* drift, double* noise) {
        Slice s{e.size(), b, cnt, e.r_comp(0), e.v_comp(0)};
        return kinetic_slice(s, e.params(), e.domain(), dt, t, u, u_zero,
                             &e.rng(0), max_reflections, drift, noise);
    });
    e.set_time(t + dt);
    return st;
}

StepStats step_overdamped(Ensemble& e, double dt, const VelocitySampler& u,
                          int threads, int max_reflections) {
    if (!(dt > 0.0)) throw ConfigError("step_overdamped: dt must be positive");
    const bool u_zero = sampler_is_zero(u);
    const double t = e.time();
    StepStats st = run_slices(e, threads, [&](std::size_t b, std::size_t cnt,
                                              double* drift, double* noise) {
        Slice s{e.size(), b, cnt, e.r_comp(0), nullptr};
        return overdamped_slice(s, e.params(), e.domain(), dt, t, u, u_zero,
                                &e.rng(0), max_reflections, drift, noise);
    });
    e.set_time(t + dt);
    return st;
}

void step_kinetic_chain(double* r, double* v, const ChainParams& p,
                        const ConvexDomain& omega, double dt, double t,
                        const VelocitySampler& u, CounterRng& rng,
                        int max_reflections) {
    const int dof = p.n_dof();
    std::vector<double> drift(dof), noise(dof);
    Slice s{1, 0, 1, r, v};
    kinetic_slice(s, p, omega, dt, t, u, sampler_is_zero(u), &rng, max_reflections,
                  drift.data(), noise.data());
}

void step_overdamped_chain(double* r, const ChainParams& p, const ConvexDomain& omega,
                           double dt, double t, const VelocitySampler& u,
                           CounterRng& rng, int max_reflections) {
    const int dof = p.n_dof();
    std::vector<double> drift(dof), noise(dof);
    Slice s{1, 0, 1, r, nullptr};
    overdamped_slice(s, p, omega, dt, t, u, sampler_is_zero(u), &rng, max_reflections,
                     drift.data(), noise.data());
}

StepStats run_ensemble(Ensemble& e, double T_final, double dt,
                       const VelocitySampler& u, bool kinetic, double snapshot_every,
                       const RunCallbacks& cb, int threads) {
    if (!(T_final > 0.0)) throw ConfigError("run_ensemble: T_final must be positive");
    const long nsteps = std::lround(T_final / dt);
    if (nsteps < 1 || std::fabs(nsteps * dt - T_final) > 1e-9 * T_final)
        throw ConfigError("run_ensemble: dt must divide T_final");
    long snap_stride = 0;
    if (snapshot_every > 0.0) snap_stride = std::max(1l, std::lround(snapshot_every / dt));

    StepStats total;
    if (cb.on_snapshot) cb.on_snapshot(e.time(), e, total);
    for (long s = 1; s <= nsteps; ++s) {
        StepStats st = kinetic ? step_kinetic(e, dt, u, threads)
                               : step_overdamped(e, dt, u, threads);
        total.reflections += st.reflections;
        if (cb.on_snapshot && ((snap_stride > 0 && s % snap_stride == 0) || s == nsteps))
            cb.on_snapshot(e.time(), e, total);
    }
    return total;
}

MomentField empirical_moments(const Ensemble& e, const RGrid& grid,
                              std::size_t offset, std::size_t stride) {
    const ChainParams& p = e.params();
    const int dof = p.n_dof();
    if (grid.P != dof)
        throw GridMismatch("empirical_moments: grid dimension != (J+1)*d");
    if (stride < 1) throw ConfigError("empirical_moments: stride must be >= 1");
    MomentField m;
    m.grid = grid;
    m.P = dof;
    const std::size_t cells = grid.cells();
    m.count.assign(cells, 0);
    m.rhobar.assign(cells, 0.0);
    m.current.assign(cells * dof, 0.0);
    m.second.assign(cells * dof * dof, 0.0);

    std::vector<int> idx(dof);
    std::vector<double> r(dof), v(dof);
    const std::size_t n = e.size();
    std::size_t used = 0;
    for (std::size_t i = offset; i < n; i += stride) {
        e.get_chain(i, r.data(), v.data());
        for (int k = 0; k < dof; ++k) idx[k] = grid.locate(k, r[k]);
        const std::size_t b = grid.flat(idx.data());
        m.count[b]++;
        ++used;
        for (int k = 0; k < dof; ++k) {
            m.current[b * dof + k] += v[k];
            for (int l = 0; l < dof; ++l)
                m.second[(b * dof + k) * dof + l] += v[k] * v[l];
        }
    }
    for (std::size_t b = 0; b < cells; ++b) {
        if (m.count[b] == 0) continue;  // EmptyBin marker
        const double inv = 1.0 / m.count[b];
        m.rhobar[b] = static_cast<double>(m.count[b]) / static_cast<double>(used);
        for (int k = 0; k < dof; ++k) m.current[b * dof + k] *= inv / p.eps;
        for (int k = 0; k < dof * dof; ++k) m.second[b * dof * dof + k] *= inv;
    }
    return m;
}

std::vector<double> velocity_component_histogram(const Ensemble& e, double vmax,
                                                 int nbins) {
    std::vector<double> hist(nbins, 0.0);
    const int dof = e.params().n_dof();
    const double h = 2.0 * vmax / nbins;
    const std::size_t n = e.size();
    for (int k = 0; k < dof; ++k) {
        const double* vk = e.v_comp(k);
        for (std::size_t i = 0; i < n; ++i) {
            const int b = static_cast<int>((vk[i] + vmax) / h);
            if (b >= 0 && b < nbins) hist[b] += 1.0;
        }
    }
    const double norm = 1.0 / (static_cast<double>(n) * dof * h);
    for (double& x : hist) x *= norm;
    return hist;
}

std::vector<double> configuration_histogram(const Ensemble& e, const RGrid& grid) {
    const int dof = e.params().n_dof();
    if (grid.P != dof)
        throw GridMismatch("configuration_histogram: grid dimension != (J+1)*d");
    std::vector<double> hist(grid.cells(), 0.0);
    std::vector<int> idx(dof);
    std::vector<double> r(dof);
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        e.get_chain(i, r.data(), nullptr);
        for (int k = 0; k < dof; ++k) idx[k] = grid.locate(k, r[k]);
        hist[grid.flat(idx.data())] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(n) * grid.cell_volume());
    for (double& x : hist) x *= norm;
    return hist;
}

}  // namespace mkv
