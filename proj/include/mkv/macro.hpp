#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mkv/chain.hpp"
#include "mkv/flow_field.hpp"
#include "mkv/geometry.hpp"
#include "mkv/grid.hpp"

namespace mkv {

// Incidence and Rouse matrices at scalar level (the d x d blocks are signed
// identities, so integer entries suffice; block expansion is index
// arithmetic).
struct RouseStructure {
    int J = 0;
    std::vector<int> B;  // (J+1) x J, row-major
    std::vector<int> R;  // J x J

    int b_at(int i, int j) const { return B[static_cast<std::size_t>(i) * J + j]; }
    int r_at(int i, int j) const { return R[static_cast<std::size_t>(i) * J + j]; }

    // Closed-form eigenvalues of the scalar Rouse matrix:
    // 4 sin^2(k pi / (2 (J+1))), k = 1..J.
    std::vector<double> eigenvalues_closed_form() const;
    // Eigenvalues computed numerically from R (Jacobi iteration), ascending.
    std::vector<double> eigenvalues_numeric() const;
};

RouseStructure build_rouse(int J);

// r in Omega^{J+1} <-> (q, x): q_j = r_{j+1} - r_j, x = mean(r).
void change_of_variables(const double* r, int J, int d, double* q, double* x);
void assemble_positions(const double* q, const double* x, int J, int d, double* r);

// Finite-difference verification of the Laplacian identity
//   sum_j d^2/dr_j^2 = dq^T R dq + (1/(J+1)) dx^2
// on closed-form test functions at random interior points. Returns the
// maximum absolute discrepancy.
using ScalarField = std::function<double(const double* r)>;
double operator_identity_check(int J, int d, const ScalarField& f, int n_points,
                               double fd_step, std::uint64_t seed);

// Conservative solver for the macroscopic density on Omega^{J+1} with
// zero-normal-flux walls. Fluxes are written in the ratio variable
// eta / exp(-V/beta), which absorbs the spring drift exactly; the grid Gibbs
// density is the exact discrete steady state when u == 0.
class EtaSolver {
public:
    EtaSolver(int n_beads, int d, const ConvexDomain& omega, int n_r, double beta,
              bool drift_enabled = true);

    const RGrid& grid() const { return grid_; }
    std::vector<double>& eta() { return eta_; }
    const std::vector<double>& eta() const { return eta_; }
    double time() const { return t_; }

    void set_uniform();
    void set_density(const std::function<double(const double* r)>& f);
    void normalize_mass();

    double mass() const;
    double min_value() const;
    double max_value() const;
    std::vector<double> gibbs_reference() const;  // normalized grid Gibbs state

    double stable_dt(const VelocitySampler* u) const;
    void step(double dt, const VelocitySampler* u);

private:
    void bead_position(const int* idx, int bead, double* pos) const;

    int nb_, d_;
    double beta_;
    bool drift_;
    RGrid grid_;
    double t_ = 0.0;
    std::vector<double> eta_;
    std::vector<double> G_;                    // exp(-V/beta) at cells (1 if !drift)
    std::vector<std::vector<double>> Gface_;   // per dim, line-major
    std::vector<std::vector<std::size_t>> lines_;
    std::vector<std::size_t> stride_;
    mutable std::vector<double> scratch_;
};

// Classical bead-spring-chain configuration grid: x over Omega (d dims),
// q over D^J (J*d dims).
struct ClassicalGrid {
    int J = 0, d = 0;
    double beta = 1.0;
    RGrid x;  // d dims
    RGrid q;  // J*d dims over (-L, L)

    std::size_t cells() const { return x.cells() * q.cells(); }
    std::size_t flat(std::size_t cx, std::size_t cq) const {
        return cx * q.cells() + cq;
    }
};

ClassicalGrid make_classical_grid(int J, int d, const ConvexDomain& omega, int n_x,
                                  int n_q, double beta);

// Spatial operator of the classical chain Fokker-Planck model applied to psi:
//   dpsi/dt = -u.grad_x psi - sum_j dq_j.((grad u q_j) psi)
//             + beta sum_ij dq_j.(R_ij Mfg dq_i (psi/Mfg))
//             + (beta/(J+1)) lap_x psi
// with zero-normal-gradient x-walls and zero-flux q-walls. u and grad_u are
// evaluated at x-cell centers (grad_u row-major d x d).
std::vector<double> classical_fp_rhs(
    const ClassicalGrid& g, const std::vector<double>& psi,
    const std::function<void(const double* x, double* u)>& u_fn,
    const std::function<void(const double* x, double* grad)>& gradu_fn);

// q-integral of a (x,q)-grid function: returns an x-grid function.
std::vector<double> integrate_q(const ClassicalGrid& g, const std::vector<double>& f);

// Equilibration diagnostics for the small-mass sweep.
struct EquilibrationMetrics {
    double velocity_marginal_l1 = 0.0;  // distance of v-marginal to the Maxwellian
    double second_moment_dev = 0.0;     // aggregated |P - beta I| deviation
    double spatial_l1_vs_eta = 0.0;     // |rhobar - eta|_{L1}
};

// L1 distance between a pooled velocity-component histogram (density on
// [-vmax, vmax] with nbins cells) and the 1-D Maxwellian of variance beta,
// using exact Gaussian bin masses.
double velocity_marginal_l1(const std::vector<double>& hist, double vmax,
                            double beta);

// Mass-weighted second-moment deviation sum_b rhobar_b |P_b - beta I|_F from
// conditional moments. With debias = true the square is estimated from the
// cross product of two independent half-ensemble moment fields (removes the
// Monte Carlo noise floor).
double second_moment_deviation(const MomentField& m, double beta);
double second_moment_deviation_debiased(const MomentField& a, const MomentField& b,
                                        double beta);

// L1 distance between a spatial histogram (bin masses, summing to <= 1) and a
// density on the same grid.
double spatial_l1_distance(const RGrid& grid, const std::vector<double>& bin_mass,
                           const std::vector<double>& density);

}  // namespace mkv
