#pragma once

#include <functional>
#include <vector>

#include "mkv/chain.hpp"
#include "mkv/geometry.hpp"
#include "mkv/grid.hpp"

namespace mkv {

// Hookean spring force F(q) = H q.
inline void hookean_force(const double* q, int d, double H, double* out) {
    for (int c = 0; c < d; ++c) out[c] = H * q[c];
}

// Kramers tensor field: one symmetric d x d tensor per fluid-grid cell.
struct StressField {
    RGrid grid;  // d-dimensional grid over Omega
    int d = 0;
    double time = 0.0;
    std::vector<double> K;  // cells * d * d, row-major per cell

    const double* tensor(std::size_t cell) const {
        return K.data() + cell * static_cast<std::size_t>(d) * d;
    }
    double* tensor(std::size_t cell) {
        return K.data() + cell * static_cast<std::size_t>(d) * d;
    }

    double sup_frobenius() const;
    // Smallest eigenvalue over all cells (d <= 3), for PSD checks.
    double min_eigenvalue() const;
    // Largest |K_ij - K_ji| over all cells.
    double max_asymmetry() const;
};

// Frobenius bound sup_x |K| <= J * H * sup_{q in D} |q|^2.
double kramers_bound(int J, double H, const ConfigurationDomain& config);

// Conditional-expectation estimator: chains are binned by centre of mass on
// the fluid grid; each bin averages sum_j H q_j (x) q_j over its chains.
// Empty bins are the zero tensor (0/0 convention).
StressField kramers_from_ensemble(const Ensemble& e, const RGrid& fluid_grid);

// Macroscopic closure: ratio of the q-integrals
//   [ int_{D^J} sum_j F(q_j) (x) q_j psi(x,q) dq ] / [ int_{D^J} psi(x,q) dq ]
// per x-cell, by midpoint quadrature with n_q points per q-dimension.
// Cells where the denominator vanishes get the zero tensor.
using ConfigDensity = std::function<double(const double* x, const double* q)>;
StressField kramers_macro(const ConfigDensity& psi, const RGrid& xgrid, int J,
                          double H, const ConfigurationDomain& config, int n_q);

}  // namespace mkv
