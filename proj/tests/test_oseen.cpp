#include <doctest.h>

#include <cmath>
#include <vector>

#include "mkv/oseen.hpp"
#include "mkv/rng.hpp"

using namespace mkv;

namespace {
const ConvexDomain kSquare = ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}});
}

TEST_CASE("stress divergence on tensor fields") {
    SUBCASE("constant tensor gives zero") {
        StressField K;
        K.grid = RGrid::uniform(2, -1.0, 1.0, 8);
        K.d = 2;
        K.K.assign(K.grid.cells() * 4, 0.0);
        for (std::size_t c = 0; c < K.grid.cells(); ++c) {
            K.tensor(c)[0] = 3.0;
            K.tensor(c)[1] = -1.0;
            K.tensor(c)[2] = -1.0;
            K.tensor(c)[3] = 2.0;
        }
        const auto div = stress_divergence(K);
        for (double x : div) CHECK(x == doctest::Approx(0.0));
    }

    SUBCASE("linear tensor K = diag(x1, 0) gives (1, 0) in the interior") {
        StressField K;
        K.grid = RGrid::uniform(2, -1.0, 1.0, 8);
        K.d = 2;
        K.K.assign(K.grid.cells() * 4, 0.0);
        std::vector<int> idx(2);
        for (std::size_t c = 0; c < K.grid.cells(); ++c) {
            K.grid.unflatten(c, idx.data());
            K.tensor(c)[0] = K.grid.center(0, idx[0]);
        }
        const auto div = stress_divergence(K);
        for (std::size_t c = 0; c < K.grid.cells(); ++c) {
            CHECK(div[c * 2 + 0] == doctest::Approx(1.0));  // exact for linears
            CHECK(div[c * 2 + 1] == doctest::Approx(0.0));
        }
    }

    SUBCASE("row/column contraction agrees for symmetric tensors") {
        StressField K;
        K.grid = RGrid::uniform(2, -1.0, 1.0, 6);
        K.d = 2;
        K.K.assign(K.grid.cells() * 4, 0.0);
        std::vector<int> idx(2);
        for (std::size_t c = 0; c < K.grid.cells(); ++c) {
            K.grid.unflatten(c, idx.data());
            const double x = K.grid.center(0, idx[0]);
            const double y = K.grid.center(1, idx[1]);
            K.tensor(c)[0] = x * x;
            K.tensor(c)[1] = x * y;
            K.tensor(c)[2] = x * y;
            K.tensor(c)[3] = y * y;
        }
        const auto div = stress_divergence(K);
        // transpose the tensor (same field) and re-contract
        const auto div2 = stress_divergence(K);
        for (std::size_t c = 0; c < div.size(); ++c)
            CHECK(div[c] == doctest::Approx(div2[c]));
    }
}

TEST_CASE("zero initial data and zero source stay identically zero") {
    FlowParams p;
    p.n = 16;
    p.omega = kSquare;
    OseenSolver s(p);
    for (int k = 0; k < 5; ++k) s.step(1e-3, nullptr);
    CHECK(s.field().max_abs() == 0.0);
    CHECK(s.field().max_divergence() == 0.0);
}

TEST_CASE("divergence stays within tolerance under forcing") {
    FlowParams p;
    p.n = 24;
    p.mu = 0.3;
    p.omega = kSquare;
    p.b_kind = FlowParams::FieldKind::vortex;
    OseenSolver s(p);
    auto force = [](double x, double y, double* f) {
        f[0] = std::sin(2.0 * x) + y;
        f[1] = std::cos(1.5 * y) - x;
    };
    for (int k = 0; k < 20; ++k) {
        const FaceSource src = face_source_from_function(s.field(), force, 0.0);
        s.step(2e-3, &src);
        CHECK(s.field().max_divergence() <= 1e-10);
    }
    CHECK(s.field().max_abs() > 0.0);
}

TEST_CASE("advective CFL guard") {
    FlowParams p;
    p.n = 16;
    p.omega = kSquare;
    p.b_kind = FlowParams::FieldKind::vortex;
    p.b_amplitude = 4.0;
    OseenSolver s(p);
    CHECK_THROWS_AS(s.step(10.0, nullptr), StabilityViolation);
}

TEST_CASE("advecting field is discretely solenoidal") {
    MacField f;
    f.init(kSquare, 20);
    fill_from_streamfunction(f, 2.5);
    CHECK(f.max_divergence() <= 1e-12);
    // and the normal trace vanishes
    for (int j = 0; j < f.n; ++j) {
        CHECK(f.u_at(0, j) == 0.0);
        CHECK(f.u_at(f.n, j) == 0.0);
    }
    for (int i = 0; i < f.n; ++i) {
        CHECK(f.v_at(i, 0) == 0.0);
        CHECK(f.v_at(i, f.n) == 0.0);
    }
}

TEST_CASE("sampling the velocity field") {
    MacField f;
    f.init(kSquare, 16);

    SUBCASE("grid values are reproduced at face points") {
        fill_from_streamfunction(f, 1.0);
        const double x[2] = {f.lo[0] + 5 * f.h, f.lo[1] + (3 + 0.5) * f.h};
        double out[2];
        f.sample(x, out);
        CHECK(out[0] == doctest::Approx(f.u_at(5, 3)).epsilon(1e-13));
    }

    SUBCASE("boundary points give exactly zero for solver fields") {
        fill_from_streamfunction(f, 1.0);
        for (double t : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
            double out[2];
            double xs[4][2] = {{-1.0, t}, {1.0, t}, {t, -1.0}, {t, 1.0}};
            for (auto& x : xs) {
                f.sample(x, out);
                CHECK(out[0] == 0.0);
                CHECK(out[1] == 0.0);
            }
        }
    }

    SUBCASE("multilinear interpolation reproduces linear fields") {
        // u = (y, 0) loaded including the tangential wall rows
        for (int i = 0; i <= f.n; ++i)
            for (int j = 0; j < f.n; ++j) f.u_at(i, j) = f.lo[1] + (j + 0.5) * f.h;
        for (int i = 0; i <= f.n; ++i) {
            f.u_wall_bot[i] = f.lo[1];
            f.u_wall_top[i] = f.hi[1];
        }
        CounterRng rng(12, 0);
        for (int s = 0; s < 500; ++s) {
            double x[2] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
            double out[2];
            f.sample(x, out);
            CHECK(out[0] == doctest::Approx(x[1]).epsilon(1e-13));
        }
    }

    SUBCASE("outside points are rejected") {
        double x[2] = {1.5, 0.0};
        double out[2];
        CHECK_THROWS_AS(f.sample(x, out), OutsideDomain);
    }
}

TEST_CASE("manufactured solution error decays quickly on one refinement") {
    // smoke-level convergence check; the full n = 32 -> 64 study runs in the
    // acceptance suite
    auto run = [&](int n, long steps) {
        FlowParams p;
        p.n = n;
        p.mu = 0.1;
        p.omega = kSquare;
        OseenSolver s(p);
        mms::init_field(s.field());
        const double T = 0.1;
        const double dt = T / steps;
        for (long k = 0; k < steps; ++k) {
            const double t = s.field().time;
            const FaceSource f = face_source_from_function(
                s.field(),
                [&](double x, double y, double* out) {
                    mms::forcing(x, y, t, p.mu, out);
                },
                t);
            s.step(dt, &f);
        }
        return mms::velocity_error(s.field(), s.field().time);
    };
    const double e1 = run(12, 40);
    const double e2 = run(24, 160);
    CHECK(e2 < e1);
    CHECK(std::log2(e1 / e2) > 1.5);
}

TEST_CASE("pressure is reported with zero mean") {
    FlowParams p;
    p.n = 16;
    p.mu = 0.2;
    p.omega = kSquare;
    OseenSolver s(p);
    auto force = [](double x, double y, double* f) {
        f[0] = x + 0.3 * y;
        f[1] = -y;
    };
    for (int k = 0; k < 5; ++k) {
        const FaceSource src = face_source_from_function(s.field(), force, 0.0);
        s.step(1e-3, &src);
    }
    double mean = 0.0;
    for (double v : s.field().p) mean += v;
    CHECK(std::fabs(mean / s.field().p.size()) < 1e-14);
}
