#pragma once

#include <functional>
#include <vector>

#include "mkv/flow_field.hpp"
#include "mkv/geometry.hpp"
#include "mkv/grid.hpp"
#include "mkv/stress.hpp"

namespace mkv {

// 2-D MAC staggered fields on a square box: u on x-faces ((n+1) x n),
// v on y-faces (n x (n+1)), pressure at cell centres (n x n). Normal
// velocities on the walls are stored degrees of freedom pinned to zero by the
// solver; tangential wall values are kept separately for interpolation.
struct MacField {
    int n = 0;
    double h = 0.0;
    double lo[2] = {0.0, 0.0};
    double hi[2] = {0.0, 0.0};
    double time = 0.0;

    std::vector<double> u;  // (n+1) * n, index i * n + j
    std::vector<double> v;  // n * (n+1), index i * (n+1) + j
    std::vector<double> p;  // n * n, index i * n + j

    // Tangential wall values (zero for solver fields; settable for tests).
    std::vector<double> u_wall_bot, u_wall_top;    // size n+1, along x-faces
    std::vector<double> v_wall_left, v_wall_right; // size n+1, along y-faces

    void init(const ConvexDomain& omega, int n_cells);

    double& u_at(int i, int j) { return u[static_cast<std::size_t>(i) * n + j]; }
    double u_at(int i, int j) const { return u[static_cast<std::size_t>(i) * n + j]; }
    double& v_at(int i, int j) { return v[static_cast<std::size_t>(i) * (n + 1) + j]; }
    double v_at(int i, int j) const {
        return v[static_cast<std::size_t>(i) * (n + 1) + j];
    }
    double& p_at(int i, int j) { return p[static_cast<std::size_t>(i) * n + j]; }
    double p_at(int i, int j) const { return p[static_cast<std::size_t>(i) * n + j]; }

    double max_divergence() const;
    double energy() const;  // (1/2) h^2 (sum u^2 + sum v^2)
    double max_abs() const;

    // Multilinear sampling with exact zeros on the boundary for solver
    // fields. Throws OutsideDomain beyond a small tolerance.
    void sample(const double* x, double* out) const;
};

// MacField exposed through the VelocitySampler interface.
struct MacVelocity final : VelocitySampler {
    const MacField* f;
    explicit MacVelocity(const MacField& field) : f(&field) {}
    int dim() const override { return 2; }
    void eval(const double* x, double t, double* out) const override {
        (void)t;
        f->sample(x, out);
    }
};

struct FlowParams {
    double mu = 1.0;
    int n = 32;
    ConvexDomain omega = ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}});

    enum class FieldKind { zero, vortex };
    FieldKind b_kind = FieldKind::zero;
    double b_amplitude = 1.0;
    FieldKind u0_kind = FieldKind::zero;
    double u0_amplitude = 1.0;

    double tol_div = 1e-10;
    double cg_tol = 1e-12;
    int cg_maxiter = 100000;
};

// Source sampled at the staggered faces (same layout as MacField u/v).
struct FaceSource {
    std::vector<double> fx;  // (n+1) * n
    std::vector<double> fy;  // n * (n+1)
};

// Row-wise divergence of a cell-centered tensor field: centered differences
// in the interior, one-sided at the boundary. Output is cell-centered, d
// components per cell.
std::vector<double> stress_divergence(const StressField& K);

// Averages a cell-centered vector field (d = 2) onto the staggered faces.
FaceSource face_source_from_cells(const RGrid& grid, const std::vector<double>& g);

// Evaluates a closed-form vector field at the staggered faces.
FaceSource face_source_from_function(
    const MacField& f, const std::function<void(double, double, double*)>& fn,
    double t);

class OseenSolver {
public:
    explicit OseenSolver(const FlowParams& params);

    const MacField& field() const { return f_; }
    MacField& field() { return f_; }
    const MacField& advecting_field() const { return b_; }
    const FlowParams& params() const { return params_; }

    // One incremental projection step: implicit diffusion, explicit upwinded
    // advection by b, explicit source, pressure correction enforcing the
    // discrete divergence constraint. Throws StabilityViolation when dt
    // violates the advective CFL and LinearSolveFailure when a Krylov solve
    // stalls.
    void step(double dt, const FaceSource* source);

    double advective_cfl_dt() const;

    // Total CG iterations spent so far (diagnostics).
    long solver_iterations() const { return cg_iters_; }

private:
    void project(double dt);

    FlowParams params_;
    MacField f_;
    MacField b_;
    std::vector<double> phi_;
    long cg_iters_ = 0;
};

// The divergence-free "vortex" test field: discrete streamfunction
// psi(x,y) = amp * (1-xh^2)^2 (1-yh^2)^2 evaluated at grid nodes, with
// xh, yh the coordinates rescaled to [-1,1]. Discrete MAC divergence is
// exactly zero and the trace vanishes.
void fill_from_streamfunction(MacField& f, double amplitude);

// Manufactured solution used by the convergence verification: an
// exponentially decaying vortex with zero boundary trace plus a sinusoidal
// pressure. Valid on the box [-1,1]^2 with b = 0.
namespace mms {
double exact_u(double x, double y, double t);
double exact_v(double x, double y, double t);
void forcing(double x, double y, double t, double mu, double* f);
// Discrete L2 error of the solver field against the exact solution at time t.
double velocity_error(const MacField& f, double t);
// Fills the field with the exactly divergence-free discrete projection of
// the initial data (streamfunction sampled at nodes).
void init_field(MacField& f);
}  // namespace mms

}  // namespace mkv
