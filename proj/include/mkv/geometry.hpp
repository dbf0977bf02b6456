#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mkv/errors.hpp"

namespace mkv {

// Bounded open convex flow domain with centroid at the origin. Two kinds are
// admitted: axis-aligned boxes and disks (balls for dim 3, intervals for
// dim 1). Box construction recenters the extents so the centroid is 0.
struct ConvexDomain {
    enum class Kind { box, disk };

    Kind kind = Kind::box;
    int dim = 1;
    std::array<double, 3> lo{};  // box bounds after recentering
    std::array<double, 3> hi{};
    double radius = 0.0;  // disk

    static ConvexDomain box(const std::vector<std::array<double, 2>>& extents);
    static ConvexDomain disk(double radius, int dim = 2);

    // Negative inside, zero on the boundary, positive outside; Lipschitz
    // constant 1.
    double signed_distance(const double* z) const;

    // Unit outward normal at a boundary point. At box corners the face with
    // the smallest face distance wins, ties broken by lowest dimension index.
    // Throws PointNotOnBoundary when |signed_distance| > tol (default
    // tol_boundary()).
    void outward_normal(const double* z, double* n, double tol = -1.0) const;

    bool contains(const double* z, double tol = 0.0) const {
        return signed_distance(z) <= tol;
    }

    double diameter() const;
    double volume() const;
    double tol_boundary() const { return 1e-12 * diameter(); }
};

// Configuration domain D = Omega - Omega for the connector vectors, with the
// tight half-width bound L such that D is contained in [-L, L]^dim.
struct ConfigurationDomain {
    ConvexDomain source;
    ConvexDomain domain;  // D itself (box for box source, disk of doubled radius)
    double half_width = 0.0;

    explicit ConfigurationDomain(const ConvexDomain& omega);

    // sup_{q in D} |q|^2, exact for both kinds.
    double sup_sq_norm() const;
};

// Specular velocity: reflects bead j's velocity block across the unit normal
// n, leaving every other block unchanged. v has n_beads*dim components.
void specular_reflect(double* v, std::size_t n_beads, int dim, std::size_t j,
                      const double* n);

// Arithmetic mean of n_beads points in Omega-bar (convexity keeps the result
// inside). Throws BeadOutsideDomain when a bead lies further than tol outside.
std::array<double, 3> center_of_mass(const ConvexDomain& omega, const double* r,
                                     std::size_t n_beads, double tol = -1.0);

// Folds an attempted move p0 -> p1 (p0 in Omega-bar) back into the domain by
// mirroring across the violated face (box) or the tangent plane at the exit
// point (disk), resolving multiple crossings in order of crossing time. When
// v_bead is non-null its dim components are specularly reflected at each
// bounce. Returns the number of reflections; throws StepRejected after
// max_reflections bounces.
int billiard_reflect(const ConvexDomain& omega, const double* p0, double* p1,
                     double* v_bead, int max_reflections = 8);

}  // namespace mkv
