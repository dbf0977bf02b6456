#pragma once

#include <cstdint>
#include <vector>

#include "mkv/flow_field.hpp"
#include "mkv/geometry.hpp"
#include "mkv/grid.hpp"
#include "mkv/rng.hpp"

namespace mkv {

// Bead-spring-chain parameters. The friction and spring stiffness scale
// factors are fixed to 1; eps^2 is the bead mass, beta the temperature
// parameter, H the spring constant entering the stress (not the drift).
struct ChainParams {
    int J = 1;
    int d = 1;
    double eps = 1.0;
    double beta = 1.0;
    double H = 1.0;

    void validate() const;
    int n_beads() const { return J + 1; }
    int n_dof() const { return (J + 1) * d; }
};

// Connectivity drift (Lr)_j: a discrete Laplacian over the chain with
// free ends, applied blockwise without materializing the matrix.
// r and out hold (J+1)*d components, bead-major.
void connectivity_apply(const double* r, double* out, int n_beads, int d);

// Spring potential whose negative r-gradient is the connectivity drift:
// V(r) = 1/2 sum_j |r_{j+1} - r_j|^2.
double chain_potential(const double* r, int n_beads, int d);

struct StepStats {
    long reflections = 0;
};

// Ensemble of N independent chains in structure-of-arrays layout
// (component-major: dof k of chain i lives at data[k*N + i]), one
// counter-based RNG stream per chain.
class Ensemble {
public:
    Ensemble(std::size_t n_chains, const ChainParams& p, const ConvexDomain& omega,
             std::uint64_t seed);

    std::size_t size() const { return n_; }
    const ChainParams& params() const { return p_; }
    const ConvexDomain& domain() const { return omega_; }
    std::uint64_t seed() const { return seed_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    double* r_comp(int dof) { return r_.data() + static_cast<std::size_t>(dof) * n_; }
    const double* r_comp(int dof) const {
        return r_.data() + static_cast<std::size_t>(dof) * n_;
    }
    double* v_comp(int dof) { return v_.data() + static_cast<std::size_t>(dof) * n_; }
    const double* v_comp(int dof) const {
        return v_.data() + static_cast<std::size_t>(dof) * n_;
    }

    void get_chain(std::size_t i, double* r, double* v) const;
    void set_chain(std::size_t i, const double* r, const double* v);

    CounterRng& rng(std::size_t i) { return rngs_[i]; }

    // Initial data.
    void init_positions_uniform();
    void init_positions_gibbs();
    void init_positions_at(const double* r);  // all chains identical
    void init_velocities_maxwellian();
    void init_velocities_zero();

private:
    ChainParams p_;
    ConvexDomain omega_;
    std::size_t n_;
    std::uint64_t seed_;
    double t_ = 0.0;
    std::vector<double> r_, v_;
    std::vector<CounterRng> rngs_;
};

// One step of the underdamped dynamics for the whole ensemble: exact
// Ornstein-Uhlenbeck velocity update with the drift frozen, position push
// r += (dt/eps) v, then specular wall resolution per bead. Throws
// StepRejected (with chain index) when a bead needs more than
// max_reflections bounces.
StepStats step_kinetic(Ensemble& e, double dt, const VelocitySampler& u,
                       int threads = 1, int max_reflections = 8);

// Euler-Maruyama step of the overdamped limit dynamics with wall folding.
StepStats step_overdamped(Ensemble& e, double dt, const VelocitySampler& u,
                          int threads = 1, int max_reflections = 8);

// Single-chain reference steps; bitwise-identical to the ensemble path run
// with N = 1 (both use the same kernel sequence).
void step_kinetic_chain(double* r, double* v, const ChainParams& p,
                        const ConvexDomain& omega, double dt, double t,
                        const VelocitySampler& u, CounterRng& rng,
                        int max_reflections = 8);
void step_overdamped_chain(double* r, const ChainParams& p,
                           const ConvexDomain& omega, double dt, double t,
                           const VelocitySampler& u, CounterRng& rng,
                           int max_reflections = 8);

// Runs the ensemble to T_final with snapshot callbacks at multiples of
// snapshot_every (and at T_final). kinetic=false selects the overdamped
// dynamics.
struct RunCallbacks {
    std::function<void(double, const Ensemble&, const StepStats&)> on_snapshot;
};
StepStats run_ensemble(Ensemble& e, double T_final, double dt,
                       const VelocitySampler& u, bool kinetic,
                       double snapshot_every, const RunCallbacks& cb,
                       int threads = 1);

// Monte Carlo moments over a configuration-space grid covering Omega^{J+1}.
// rhobar is the bin-probability mass (sums to 1); current and second hold the
// conditional moments mean(v)/eps and mean(v (x) v) per occupied bin. Bins
// with count == 0 are the EmptyBin markers (all moment entries zero).
struct MomentField {
    RGrid grid;
    int P = 0;  // velocity dimensions per chain
    std::vector<std::uint32_t> count;
    std::vector<double> rhobar;
    std::vector<double> current;  // cells * P
    std::vector<double> second;   // cells * P * P
};

// offset/stride select a deterministic sub-ensemble (for paired noise
// estimates); the default covers every chain.
MomentField empirical_moments(const Ensemble& e, const RGrid& grid,
                              std::size_t offset = 0, std::size_t stride = 1);

// Pooled histogram of all velocity components over [-vmax, vmax] with nbins
// cells, normalized as a density (integrates to the retained fraction).
std::vector<double> velocity_component_histogram(const Ensemble& e, double vmax,
                                                 int nbins);

// Spatial histogram of bead configurations on the grid (a density on
// Omega^{J+1}, integrates to 1).
std::vector<double> configuration_histogram(const Ensemble& e, const RGrid& grid);

}  // namespace mkv
