#include <doctest.h>

#include <cmath>
#include <vector>

#include "mkv/fokker_planck.hpp"
#include "mkv/chain.hpp"

using namespace mkv;

namespace {

FpParams desk_params(double eps = 1.0, double beta = 1.0) {
    FpParams p;
    p.n_beads = 2;
    p.d = 1;
    p.eps = eps;
    p.beta = beta;
    return p;
}

PhaseGridSpec small_grid(int n_r = 10, int n_v = 16) {
    PhaseGridSpec g;
    g.omega = ConvexDomain::box({{-1.0, 1.0}});
    g.n_r = n_r;
    g.n_v = n_v;
    g.v_max = 6.0;
    return g;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(FpSolver(desk_params(), small_grid(10, 6)), GridTooCoarse);
    PhaseGridSpec g = small_grid();
    g.v_max = 2.0;  // does not cover 6 sqrt(beta)
    CHECK_THROWS_AS(FpSolver(desk_params(), g), ConfigError);
}

TEST_CASE("conservative operator: zero total mass derivative") {
    FpSolver fp(desk_params(0.5), small_grid());
    fp.set_uniform();
    std::vector<double> out;
    fp.apply_operator(fp.rho(), nullptr, out);
    // weighted total: sum M * out * vol telescopes to zero exactly
    double acc = 0.0;
    std::size_t idx = 0;
    const auto& rho = fp.rho();
    (void)rho;
    // recompute the Maxwellian weights through the moments of an indicator:
    // instead integrate via mass(): perturb rho by dt*out and check mass
    std::vector<double> saved = fp.rho();
    for (std::size_t c = 0; c < out.size(); ++c) fp.rho()[c] = saved[c] + out[c];
    const double m1 = fp.mass();
    fp.rho() = saved;
    const double m0 = fp.mass();
    acc = m1 - m0;
    (void)idx;
    CHECK(std::fabs(acc) < 1e-12);
}

TEST_CASE("reduced velocity diffusion matches the closed form") {
    // single bead, 1-D: apply the diffusion operator to rho_hat = v and
    // compare with (beta^2/eps^2) d_v (M d_v v) / M = -(beta/eps^2) v
    FpParams p;
    p.n_beads = 1;
    p.d = 1;
    p.eps = 0.7;
    p.beta = 1.0;
    PhaseGridSpec g = small_grid(4, 64);
    FpSolver fp(p, g);
    std::vector<double> rho(fp.cells());
    const int nv = fp.n_v();
    const std::size_t NR = fp.r_grid().cells();
    for (std::size_t rf = 0; rf < NR; ++rf)
        for (int iv = 0; iv < nv; ++iv) rho[rf * nv + iv] = fp.v_center(iv);
    std::vector<double> out;
    fp.apply_diffusion(rho, out);
    const double fac = -p.beta / (p.eps * p.eps);
    for (int iv = nv / 4; iv < 3 * nv / 4; ++iv) {  // interior nodes
        const double v = fp.v_center(iv);
        CHECK(out[iv] == doctest::Approx(fac * v).epsilon(2e-3));
    }
}

TEST_CASE("alpha regularization acts only through the r-diffusion term") {
    FpParams p;
    p.n_beads = 1;  // no spring drift, G == 1
    p.d = 1;
    PhaseGridSpec g = small_grid(16, 16);
    FpSolver base(p, g, 0.0);
    FpSolver reg(p, g, 0.05);
    // v-independent profile; smooth in r
    auto f = [](const double* r, const double*) {
        return 1.0 + 0.5 * std::cos(1.2 * r[0]);
    };
    base.set_density(f);
    std::vector<double> rho = base.rho();
    std::vector<double> out0, out1;
    base.apply_operator(rho, nullptr, out0);
    reg.apply_operator(rho, nullptr, out1);
    // the difference is alpha * d_r(M d_r rho)/M = alpha * rho'' to O(h^2)
    const int nv = base.n_v();
    const RGrid& rg = base.r_grid();
    for (int ir = 3; ir < rg.n[0] - 3; ++ir) {
        const double x = rg.center(0, ir);
        const double expect = 0.05 * (-0.5 * 1.2 * 1.2 * std::cos(1.2 * x)) /
                              (1.0 + 0.5 * std::cos(1.2 * x));
        // normalize out the density scale: d(rho)/rho
        const std::size_t c = static_cast<std::size_t>(ir) * nv + nv / 2;
        const double got = (out1[c] - out0[c]) / rho[c];
        CHECK(got == doctest::Approx(expect).epsilon(0.03));
    }
}

TEST_CASE("discrete Gibbs state is a fixed point of the step") {
    FpSolver fp(desk_params(0.5), small_grid(12, 16));
    fp.set_gibbs();
    const std::vector<double> rho0 = fp.rho();
    const double dt = 0.8 * fp.stable_dt(nullptr);
    for (int s = 0; s < 100; ++s) fp.step(dt, nullptr);
    double l1 = 0.0;
    for (std::size_t c = 0; c < rho0.size(); ++c)
        l1 += std::fabs(fp.rho()[c] - rho0[c]);
    l1 *= fp.cell_volume();
    CHECK(l1 < 1e-10);
}

TEST_CASE("mass conservation along a uniform-start run") {
    FpSolver fp(desk_params(0.5), small_grid(10, 16));
    fp.set_uniform();
    const double dt = 0.8 * fp.stable_dt(nullptr);
    for (int s = 0; s < 200; ++s) fp.step(dt, nullptr);
    CHECK(std::fabs(fp.mass() - 1.0) < 1e-12);
    CHECK(fp.min_density() >= -1e-12);
}

TEST_CASE("single-bead uniform state is invariant") {
    FpParams p;
    p.n_beads = 1;
    p.d = 1;
    FpSolver fp(p, small_grid(10, 16));
    fp.set_uniform();
    const std::vector<double> rho0 = fp.rho();
    const double dt = 0.8 * fp.stable_dt(nullptr);
    for (int s = 0; s < 20; ++s) fp.step(dt, nullptr);
    for (std::size_t c = 0; c < rho0.size(); ++c)
        CHECK(fp.rho()[c] == doctest::Approx(rho0[c]).epsilon(1e-12));
}

TEST_CASE("relative entropy values") {
    FpSolver fp(desk_params(), small_grid());
    fp.set_uniform();  // rho_hat == 1 after normalization (up to truncation)
    CHECK(fp.relative_entropy() == doctest::Approx(0.0).epsilon(1e-6));

    // rho_hat == e has entropy F(e) = 1 against the truncated Maxwellian mass
    std::fill(fp.rho().begin(), fp.rho().end(), std::exp(1.0));
    CHECK(fp.relative_entropy() == doctest::Approx(1.0).epsilon(1e-6));

    // zeros are handled through F(0) = 1 without overflow
    std::fill(fp.rho().begin(), fp.rho().end(), 0.0);
    const double e0 = fp.relative_entropy();
    CHECK(std::isfinite(e0));
    CHECK(e0 == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(entropy_integrand(0.0) == 1.0);
    CHECK(entropy_integrand(1.0) == doctest::Approx(0.0));
}

TEST_CASE("fisher dissipation") {
    FpParams p;
    p.n_beads = 1;
    p.d = 1;
    PhaseGridSpec g = small_grid(2, 128);
    FpSolver fp(p, g);

    SUBCASE("constant state has zero dissipation") {
        fp.set_uniform();
        CHECK(fp.fisher_dissipation() == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("matches high-order quadrature on a smooth profile") {
        auto f = [](const double*, const double* v) {
            return 1.0 + 0.1 * std::sin(v[0]);
        };
        fp.set_density(f);
        // oracle: int M (0.1 cos v)^2 / (1 + 0.1 sin v) dv over the truncated
        // range, divided by the per-r Maxwellian mass of the profile (the
        // dissipation is 1-homogeneous, so the normalization scale divides
        // out together with the r-volume).
        const int nq = 200000;
        const double a = -6.0, b = 6.0;
        const double h = (b - a) / nq;
        double integral = 0.0, mass = 0.0;
        const double norm = 1.0 / std::sqrt(2.0 * M_PI);
        for (int i = 0; i < nq; ++i) {
            const double v = a + (i + 0.5) * h;
            const double M = norm * std::exp(-0.5 * v * v);
            const double rho = 1.0 + 0.1 * std::sin(v);
            const double dr = 0.1 * std::cos(v);
            integral += M * dr * dr / rho * h;
            mass += M * rho * h;
        }
        const double expect = integral / mass;
        CHECK(fp.fisher_dissipation() == doctest::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("moments of a factorized state") {
    FpSolver fp(desk_params(0.5), small_grid(10, 32));
    auto f = [](const double* r, const double*) {
        return (1.0 + 0.3 * std::sin(1.1 * r[0])) * (1.0 + 0.2 * std::cos(0.9 * r[1]));
    };
    fp.set_density(f);
    const auto m = fp.moments();

    SUBCASE("current vanishes by parity") {
        for (double j : m.current) CHECK(std::fabs(j) < 1e-12);
    }
    SUBCASE("second moment equals beta rhobar I") {
        const std::size_t NR = m.grid.cells();
        for (std::size_t rf = 0; rf < NR; ++rf) {
            CHECK(m.second[(rf * 2 + 0) * 2 + 0] ==
                  doctest::Approx(m.rhobar[rf]).epsilon(1e-6));
            CHECK(m.second[(rf * 2 + 1) * 2 + 1] ==
                  doctest::Approx(m.rhobar[rf]).epsilon(1e-6));
            CHECK(std::fabs(m.second[(rf * 2 + 0) * 2 + 1]) < 1e-12);
        }
    }
    SUBCASE("spatial marginal integrates to one") {
        double acc = 0.0;
        for (double x : m.rhobar) acc += x;
        acc *= m.grid.cell_volume();
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("entropy dissipation along a relaxation run") {
    FpSolver fp(desk_params(0.5), small_grid(10, 16));
    fp.set_uniform();
    const double dt = 0.8 * fp.stable_dt(nullptr);
    std::vector<EnergyLogEntry> log;
    auto record = [&]() {
        EnergyLogEntry e;
        e.t = fp.time();
        e.mass = fp.mass();
        e.entropy = fp.relative_entropy();
        e.fisher = fp.fisher_dissipation();
        e.gibbs_entropy = fp.gibbs_relative_entropy();
        log.push_back(e);
    };
    record();
    for (int s = 0; s < 150; ++s) {
        fp.step(dt, nullptr);
        record();
    }
    const ConfigurationDomain conf(ConvexDomain::box({{-1.0, 1.0}}));
    const auto rep = check_energy_inequality(log, fp.params(), conf.half_width);
    CHECK(rep.gibbs_entropy_monotone);
    CHECK(rep.bound_holds);
    // dissipation integral is non-decreasing by construction
    for (std::size_t i = 1; i < rep.lhs.size(); ++i)
        CHECK(log[i].fisher >= -1e-15);
    // the state relaxes towards Gibbs
    CHECK(log.back().gibbs_entropy < log.front().gibbs_entropy);
}

TEST_CASE("splitting variants both conserve mass") {
    for (Splitting s : {Splitting::strang, Splitting::lie}) {
        FpSolver fp(desk_params(0.5), small_grid(8, 16), 0.0, s);
        fp.set_uniform();
        const double dt = 0.4 * fp.stable_dt(nullptr);
        for (int k = 0; k < 50; ++k) fp.step(dt, nullptr);
        CHECK(std::fabs(fp.mass() - 1.0) < 1e-12);
    }
}

TEST_CASE("stability guard rejects large steps") {
    FpSolver fp(desk_params(0.25), small_grid(8, 16));
    fp.set_uniform();
    CHECK_THROWS_AS(fp.step(10.0 * fp.stable_dt(nullptr), nullptr),
                    StabilityViolation);
}

TEST_CASE("kinetic solver marginal matches the particle histogram") {
    // cross-validation of the two routes at matched configuration
    const double eps = 0.5, beta = 1.0, T = 0.4;
    FpSolver fp(desk_params(eps, beta), small_grid(10, 16));
    fp.set_uniform();
    {
        double dt = 0.8 * fp.stable_dt(nullptr);
        const long n = std::lround(T / dt) + 1;
        dt = T / n;
        for (long s = 0; s < n; ++s) fp.step(dt, nullptr);
    }
    const auto mom = fp.moments();

    ChainParams cp;
    cp.J = 1;
    cp.d = 1;
    cp.eps = eps;
    cp.beta = beta;
    Ensemble e(30000, cp, ConvexDomain::box({{-1.0, 1.0}}), 314159);
    e.init_positions_uniform();
    e.init_velocities_maxwellian();
    ZeroVelocity u(1);
    RunCallbacks cb;
    run_ensemble(e, T, 1e-3, u, true, 0.0, cb);
    const auto hist = configuration_histogram(e, mom.grid);

    double l1 = 0.0;
    for (std::size_t c = 0; c < hist.size(); ++c)
        l1 += std::fabs(hist[c] - mom.rhobar[c]) * mom.grid.cell_volume();
    CHECK(l1 < 0.12);  // discretization + Monte Carlo band
}
