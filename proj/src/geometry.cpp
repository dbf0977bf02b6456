#include "mkv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mkv {

ConvexDomain ConvexDomain::box(const std::vector<std::array<double, 2>>& extents) {
    if (extents.empty() || extents.size() > 3)
        throw ConfigError("box: dim must be 1, 2 or 3");
    ConvexDomain d;
    d.kind = Kind::box;
    d.dim = static_cast<int>(extents.size());
    for (int k = 0; k < d.dim; ++k) {
        const double lo = extents[k][0];
        const double hi = extents[k][1];
        if (!(lo < hi)) throw ConfigError("box: lo must be < hi in every dimension");
        const double c = 0.5 * (lo + hi);  // recenter so the centroid is 0
        d.lo[k] = lo - c;
        d.hi[k] = hi - c;
    }
    return d;
}

ConvexDomain ConvexDomain::disk(double radius, int dim) {
    if (!(radius > 0.0)) throw ConfigError("disk: radius must be positive");
    if (dim < 1 || dim > 3) throw ConfigError("disk: dim must be 1, 2 or 3");
    ConvexDomain d;
    d.kind = Kind::disk;
    d.dim = dim;
    d.radius = radius;
    return d;
}

double ConvexDomain::signed_distance(const double* z) const {
    if (kind == Kind::disk) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += z[k] * z[k];
        return std::sqrt(s) - radius;
    }
    // Box: inside -> -(min face distance); outside -> distance to the box.
    double inside_min = INFINITY;
    double out_sq = 0.0;
    bool outside = false;
    for (int k = 0; k < dim; ++k) {
        const double dlo = z[k] - lo[k];
        const double dhi = hi[k] - z[k];
        if (dlo < 0.0) {
            outside = true;
            out_sq += dlo * dlo;
        } else if (dhi < 0.0) {
            outside = true;
            out_sq += dhi * dhi;
        }
        inside_min = std::min(inside_min, std::min(dlo, dhi));
    }
    if (outside) return std::sqrt(out_sq);
    return -inside_min;
}

void ConvexDomain::outward_normal(const double* z, double* n, double tol) const {
    if (tol < 0.0) tol = tol_boundary();
    const double sd = signed_distance(z);
    if (std::fabs(sd) > tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "outward_normal: point is %.3e from the boundary (tol %.3e)",
                      sd, tol);
        throw PointNotOnBoundary(buf);
    }
    if (kind == Kind::disk) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += z[k] * z[k];
        const double r = std::sqrt(s);
        if (r == 0.0) throw PointNotOnBoundary("outward_normal: centre of disk");
        for (int k = 0; k < dim; ++k) n[k] = z[k] / r;
        return;
    }
    int best = 0;
    double best_dist = INFINITY;
    double best_sign = 1.0;
    for (int k = 0; k < dim; ++k) {
        const double dlo = std::fabs(z[k] - lo[k]);
        const double dhi = std::fabs(hi[k] - z[k]);
        if (dlo < best_dist) {
            best_dist = dlo;
            best = k;
            best_sign = -1.0;
        }
        if (dhi < best_dist) {
            best_dist = dhi;
            best = k;
            best_sign = 1.0;
        }
    }
    for (int k = 0; k < dim; ++k) n[k] = 0.0;
    n[best] = best_sign;
}

double ConvexDomain::diameter() const {
    if (kind == Kind::disk) return 2.0 * radius;
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double w = hi[k] - lo[k];
        s += w * w;
    }
    return std::sqrt(s);
}

double ConvexDomain::volume() const {
    if (kind == Kind::disk) {
        switch (dim) {
            case 1: return 2.0 * radius;
            case 2: return M_PI * radius * radius;
            default: return 4.0 / 3.0 * M_PI * radius * radius * radius;
        }
    }
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
    return v;
}

ConfigurationDomain::ConfigurationDomain(const ConvexDomain& omega) : source(omega) {
    if (omega.kind == ConvexDomain::Kind::box) {
        std::vector<std::array<double, 2>> ext(omega.dim);
        for (int k = 0; k < omega.dim; ++k) {
            const double s = omega.hi[k] - omega.lo[k];
            ext[k] = {-s, s};
        }
        domain = ConvexDomain::box(ext);
        half_width = 0.0;
        for (int k = 0; k < omega.dim; ++k)
            half_width = std::max(half_width, omega.hi[k] - omega.lo[k]);
    } else {
        domain = ConvexDomain::disk(2.0 * omega.radius, omega.dim);
        half_width = 2.0 * omega.radius;
    }
}

double ConfigurationDomain::sup_sq_norm() const {
    if (domain.kind == ConvexDomain::Kind::disk) return domain.radius * domain.radius;
    double s = 0.0;
    for (int k = 0; k < domain.dim; ++k)
        s += domain.hi[k] * domain.hi[k];
    return s;
}

void specular_reflect(double* v, std::size_t n_beads, int dim, std::size_t j,
                      const double* n) {
    (void)n_beads;
    double* vj = v + j * static_cast<std::size_t>(dim);
    double vn = 0.0;
    for (int k = 0; k < dim; ++k) vn += vj[k] * n[k];
    for (int k = 0; k < dim; ++k) vj[k] -= 2.0 * vn * n[k];
}

std::array<double, 3> center_of_mass(const ConvexDomain& omega, const double* r,
                                     std::size_t n_beads, double tol) {
    if (tol < 0.0) tol = omega.tol_boundary();
    std::array<double, 3> x{};
    const int d = omega.dim;
    for (std::size_t j = 0; j < n_beads; ++j) {
        const double* rj = r + j * static_cast<std::size_t>(d);
        const double sd = omega.signed_distance(rj);
        if (sd > tol) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "center_of_mass: bead %zu is %.3e outside the domain", j,
                          sd);
            throw BeadOutsideDomain(buf);
        }
        for (int k = 0; k < d; ++k) x[k] += rj[k];
    }
    for (int k = 0; k < d; ++k) x[k] /= static_cast<double>(n_beads);
    return x;
}

namespace {

// First boundary crossing of the segment p0 + t (p1 - p0), t in (0, 1], for a
// box. Returns the crossing parameter, the face dimension and side; t > 1
// when the segment stays inside.
struct BoxCrossing {
    double t = INFINITY;
    int k = -1;
    double side = 0.0;  // +1 hi face, -1 lo face
};

BoxCrossing first_box_crossing(const ConvexDomain& box, const double* p0,
                               const double* p1) {
    BoxCrossing c;
    for (int k = 0; k < box.dim; ++k) {
        const double dk = p1[k] - p0[k];
        if (dk > 0.0 && p1[k] > box.hi[k]) {
            const double t = (box.hi[k] - p0[k]) / dk;
            if (t < c.t) c = {t, k, +1.0};
        } else if (dk < 0.0 && p1[k] < box.lo[k]) {
            const double t = (box.lo[k] - p0[k]) / dk;
            if (t < c.t) c = {t, k, -1.0};
        }
    }
    return c;
}

}  // namespace

int billiard_reflect(const ConvexDomain& omega, const double* p0, double* p1,
                     double* v_bead, int max_reflections) {
    const int d = omega.dim;
    std::array<double, 3> cur{};
    for (int k = 0; k < d; ++k) cur[k] = p0[k];

    int bounces = 0;
    while (omega.signed_distance(p1) > 0.0) {
        if (bounces >= max_reflections)
            throw StepRejected("billiard_reflect: too many wall reflections in one step");
        if (omega.kind == ConvexDomain::Kind::box) {
            const BoxCrossing c = first_box_crossing(omega, cur.data(), p1);
            if (c.k < 0) break;  // round-off: already inside
            const double wall = c.side > 0.0 ? omega.hi[c.k] : omega.lo[c.k];
            for (int k = 0; k < d; ++k)
                cur[k] = cur[k] + c.t * (p1[k] - cur[k]);
            cur[c.k] = wall;
            p1[c.k] = 2.0 * wall - p1[c.k];  // mirror the overshoot
            if (v_bead) v_bead[c.k] = -v_bead[c.k];
        } else {
            // Disk: crossing parameter solves |cur + t (p1 - cur)| = radius.
            double a = 0.0, b = 0.0, cc = -omega.radius * omega.radius;
            for (int k = 0; k < d; ++k) {
                const double dk = p1[k] - cur[k];
                a += dk * dk;
                b += 2.0 * cur[k] * dk;
                cc += cur[k] * cur[k];
            }
            if (a == 0.0) break;
            const double disc = b * b - 4.0 * a * cc;
            if (disc < 0.0) break;
            const double t = (-b + std::sqrt(disc)) / (2.0 * a);
            std::array<double, 3> hit{};
            double norm = 0.0;
            for (int k = 0; k < d; ++k) {
                hit[k] = cur[k] + t * (p1[k] - cur[k]);
                norm += hit[k] * hit[k];
            }
            norm = std::sqrt(norm);
            std::array<double, 3> n{};
            for (int k = 0; k < d; ++k) n[k] = hit[k] / norm;
            double wn = 0.0, vn = 0.0;
            for (int k = 0; k < d; ++k) wn += (p1[k] - hit[k]) * n[k];
            for (int k = 0; k < d; ++k) p1[k] -= 2.0 * wn * n[k];
            if (v_bead) {
                for (int k = 0; k < d; ++k) vn += v_bead[k] * n[k];
                for (int k = 0; k < d; ++k) v_bead[k] -= 2.0 * vn * n[k];
            }
            cur = hit;
        }
        ++bounces;
    }
    return bounces;
}

}  // namespace mkv
