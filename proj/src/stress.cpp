#include "mkv/stress.hpp"

#include <cmath>

namespace mkv {

double StressField::sup_frobenius() const {
    const std::size_t cells = grid.cells();
    double m = 0.0;
    for (std::size_t b = 0; b < cells; ++b) {
        double s = 0.0;
        const double* t = tensor(b);
        for (int k = 0; k < d * d; ++k) s += t[k] * t[k];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

namespace {

double sym_min_eig(const double* t, int d) {
    if (d == 1) return t[0];
    if (d == 2) {
        const double a = t[0], b = 0.5 * (t[1] + t[2]), c = t[3];
        const double tr = a + c;
        const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        return 0.5 * tr - disc;
    }
    // d == 3: Jacobi sweeps on the symmetrized tensor.
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = 0.5 * (t[i * 3 + j] + t[j * 3 + i]);
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::fabs(m[0][1]) + std::fabs(m[0][2]) + std::fabs(m[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::fabs(m[p][q]) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * m[p][q], m[q][q] - m[p][p]);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < 3; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    return std::min(m[0][0], std::min(m[1][1], m[2][2]));
}

}  // namespace

double StressField::min_eigenvalue() const {
    const std::size_t cells = grid.cells();
    double m = INFINITY;
    for (std::size_t b = 0; b < cells; ++b) m = std::min(m, sym_min_eig(tensor(b), d));
    return m;
}

double StressField::max_asymmetry() const {
    const std::size_t cells = grid.cells();
    double m = 0.0;
    for (std::size_t b = 0; b < cells; ++b) {
        const double* t = tensor(b);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                m = std::max(m, std::fabs(t[i * d + j] - t[j * d + i]));
    }
    return m;
}

double kramers_bound(int J, double H, const ConfigurationDomain& config) {
    return J * H * config.sup_sq_norm();
}

StressField kramers_from_ensemble(const Ensemble& e, const RGrid& fluid_grid) {
    const ChainParams& p = e.params();
    const int d = p.d;
    if (fluid_grid.P != d)
        throw GridMismatch("kramers_from_ensemble: fluid grid dimension != d");

    StressField out;
    out.grid = fluid_grid;
    out.d = d;
    out.time = e.time();
    const std::size_t cells = fluid_grid.cells();
    out.K.assign(cells * d * d, 0.0);
    std::vector<std::uint32_t> count(cells, 0);

    const int nb = p.n_beads();
    std::vector<double> r(static_cast<std::size_t>(nb) * d);
    std::vector<int> idx(d);
    std::vector<double> t(static_cast<std::size_t>(d) * d);
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        e.get_chain(i, r.data(), nullptr);
        // centre of mass locates the bin
        for (int c = 0; c < d; ++c) {
            double x = 0.0;
            for (int j = 0; j < nb; ++j) x += r[j * d + c];
            idx[c] = fluid_grid.locate(c, x / nb);
        }
        const std::size_t b = fluid_grid.flat(idx.data());
        for (int k = 0; k < d * d; ++k) t[k] = 0.0;
        for (int j = 0; j + 1 < nb; ++j) {
            for (int a = 0; a < d; ++a) {
                const double qa = r[(j + 1) * d + a] - r[j * d + a];
                for (int c = 0; c < d; ++c) {
                    const double qc = r[(j + 1) * d + c] - r[j * d + c];
                    t[a * d + c] += p.H * qa * qc;
                }
            }
        }
        double* Kb = out.tensor(b);
        for (int k = 0; k < d * d; ++k) Kb[k] += t[k];
        count[b]++;
    }
    for (std::size_t b = 0; b < cells; ++b) {
        if (count[b] == 0) continue;  // 0/0 convention: zero tensor
        double* Kb = out.tensor(b);
        for (int k = 0; k < d * d; ++k) Kb[k] /= count[b];
    }
    return out;
}

StressField kramers_macro(const ConfigDensity& psi, const RGrid& xgrid, int J,
                          double H, const ConfigurationDomain& config, int n_q) {
    const int d = config.source.dim;
    if (xgrid.P != d) throw GridMismatch("kramers_macro: x grid dimension != d");
    if (n_q < 2) throw ConfigError("kramers_macro: n_q must be >= 2");

    StressField out;
    out.grid = xgrid;
    out.d = d;
    const std::size_t cells = xgrid.cells();
    out.K.assign(cells * d * d, 0.0);

    // Midpoint tensor quadrature over the bounding box [-L, L]^{Jd} of D^J;
    // points whose connectors fall outside D are skipped (indicator of D^J).
    const int QD = J * d;
    const double L = config.half_width;
    const double hq = 2.0 * L / n_q;
    std::size_t qpoints = 1;
    for (int k = 0; k < QD; ++k) qpoints *= static_cast<std::size_t>(n_q);

    std::vector<int> qi(QD);
    std::vector<double> q(QD), x(d), num(static_cast<std::size_t>(d) * d);
    std::vector<int> xi(d);
    const bool box_D = config.domain.kind == ConvexDomain::Kind::box;

    for (std::size_t cx = 0; cx < cells; ++cx) {
        xgrid.unflatten(cx, xi.data());
        for (int c = 0; c < d; ++c) x[c] = xgrid.center(c, xi[c]);
        double den = 0.0;
        for (int k = 0; k < d * d; ++k) num[k] = 0.0;
        for (std::size_t f = 0; f < qpoints; ++f) {
            std::size_t rem = f;
            bool inside = true;
            for (int k = QD - 1; k >= 0; --k) {
                qi[k] = static_cast<int>(rem % n_q);
                rem /= n_q;
                q[k] = -L + (qi[k] + 0.5) * hq;
            }
            if (!box_D) {
                for (int j = 0; j < J && inside; ++j)
                    inside = config.domain.signed_distance(&q[j * d]) <= 0.0;
            }
            if (!inside) continue;
            const double w = psi(x.data(), q.data());
            if (w == 0.0) continue;
            den += w;
            for (int j = 0; j < J; ++j)
                for (int a = 0; a < d; ++a)
                    for (int c = 0; c < d; ++c)
                        num[a * d + c] += H * q[j * d + a] * q[j * d + c] * w;
        }
        if (den > 0.0) {
            double* Kb = out.tensor(cx);
            for (int k = 0; k < d * d; ++k) Kb[k] = num[k] / den;
        }
        // den == 0: zero tensor by the 0/0 convention
    }
    return out;
}

}  // namespace mkv
