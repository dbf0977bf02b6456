#include <doctest.h>

#include <cmath>
#include <vector>

#include "mkv/rng.hpp"
#include "mkv/stress.hpp"

using namespace mkv;

namespace {

Ensemble make_ensemble_2d(std::size_t n, double H, std::uint64_t seed) {
    ChainParams p;
    p.J = 1;
    p.d = 2;
    p.eps = 1.0;
    p.beta = 1.0;
    p.H = H;
    return Ensemble(n, p, ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}}), seed);
}

}  // namespace

TEST_CASE("hookean force") {
    double q0[2] = {0.0, 0.0};
    double f[2];
    hookean_force(q0, 2, 1.0, f);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
    double q1[2] = {1.0, 0.0};
    hookean_force(q1, 2, 1.0, f);
    CHECK(f[0] == doctest::Approx(1.0));
    double q2[2] = {1.0, -3.0};
    hookean_force(q2, 2, 2.0, f);
    CHECK(f[0] == doctest::Approx(2.0));
    CHECK(f[1] == doctest::Approx(-6.0));
}

TEST_CASE("kramers from a single chain") {
    auto e = make_ensemble_2d(1, 1.0, 1);
    double r[4] = {0.0, 0.0, 1.0, 0.0};  // q = (1, 0), com = (0.5, 0)
    e.set_chain(0, r, nullptr);
    RGrid grid = RGrid::uniform(2, -1.0, 1.0, 4);
    const auto K = kramers_from_ensemble(e, grid);
    int idx[2] = {grid.locate(0, 0.5), grid.locate(1, 0.0)};
    const std::size_t b = grid.flat(idx);
    CHECK(K.tensor(b)[0] == doctest::Approx(1.0));
    CHECK(K.tensor(b)[1] == doctest::Approx(0.0));
    CHECK(K.tensor(b)[3] == doctest::Approx(0.0));
    for (std::size_t c = 0; c < grid.cells(); ++c) {
        if (c == b) continue;
        for (int k = 0; k < 4; ++k) CHECK(K.tensor(c)[k] == 0.0);
    }
    CHECK(K.max_asymmetry() == 0.0);
    CHECK(K.min_eigenvalue() >= 0.0);
}

TEST_CASE("kramers is even under the connector flip") {
    auto e = make_ensemble_2d(4, 1.5, 2);
    double r0[4] = {0.1, 0.1, 0.5, -0.2};
    double r0m[4] = {0.5, -0.2, 0.1, 0.1};
    double r1[4] = {-0.4, 0.0, -0.1, 0.3};
    double r1m[4] = {-0.1, 0.3, -0.4, 0.0};
    e.set_chain(0, r0, nullptr);
    e.set_chain(1, r0m, nullptr);
    e.set_chain(2, r1, nullptr);
    e.set_chain(3, r1m, nullptr);
    RGrid grid = RGrid::uniform(2, -1.0, 1.0, 2);
    const auto K = kramers_from_ensemble(e, grid);

    auto ee = make_ensemble_2d(4, 1.5, 3);
    ee.set_chain(0, r0m, nullptr);
    ee.set_chain(1, r0, nullptr);
    ee.set_chain(2, r1m, nullptr);
    ee.set_chain(3, r1, nullptr);
    const auto K2 = kramers_from_ensemble(ee, grid);
    for (std::size_t c = 0; c < grid.cells(); ++c)
        for (int k = 0; k < 4; ++k)
            CHECK(K.tensor(c)[k] == doctest::Approx(K2.tensor(c)[k]).epsilon(1e-14));
}

TEST_CASE("ensemble closure reproduces the Gaussian second moment") {
    ChainParams p;
    p.J = 1;
    p.d = 1;
    p.eps = 1.0;
    p.beta = 0.8;
    p.H = 2.0;
    const auto omega = ConvexDomain::box({{-20.0, 20.0}});
    const std::size_t N = 100000;
    Ensemble e(N, p, omega, 17);
    CounterRng rng(18, 0);
    const double sig = std::sqrt(p.beta);
    for (std::size_t i = 0; i < N; ++i) {
        const double q = sig * rng.gaussian();
        double r[2] = {-0.5 * q, 0.5 * q};
        e.set_chain(i, r, nullptr);
    }
    RGrid grid = RGrid::uniform(1, -20.0, 20.0, 1);
    const auto K = kramers_from_ensemble(e, grid);
    const double expect = p.J * p.H * p.beta;
    const double se = p.H * p.beta * std::sqrt(2.0 / N);
    CHECK(std::fabs(K.tensor(0)[0] - expect) < 4.0 * se);
}

TEST_CASE("sup-norm bound and PSD hold on random ensembles") {
    auto e = make_ensemble_2d(500, 1.0, 4);
    e.init_positions_uniform();
    RGrid grid = RGrid::uniform(2, -1.0, 1.0, 6);
    const auto K = kramers_from_ensemble(e, grid);
    const ConfigurationDomain conf(e.domain());
    const double bound = kramers_bound(e.params().J, e.params().H, conf);
    CHECK(K.sup_frobenius() <= bound * (1.0 + 1e-12));
    CHECK(K.min_eigenvalue() >= -1e-12);
    CHECK(K.max_asymmetry() <= 1e-14);
}

TEST_CASE("refining the grid and re-aggregating reproduces the parent tensor") {
    auto e = make_ensemble_2d(2000, 1.0, 5);
    e.init_positions_uniform();
    RGrid coarse = RGrid::uniform(2, -1.0, 1.0, 3);
    RGrid fine = RGrid::uniform(2, -1.0, 1.0, 6);
    const auto Kc = kramers_from_ensemble(e, coarse);
    const auto Kf = kramers_from_ensemble(e, fine);

    std::vector<double> counts(fine.cells(), 0.0);
    {
        std::vector<double> r(4);
        for (std::size_t i = 0; i < e.size(); ++i) {
            e.get_chain(i, r.data(), nullptr);
            int idx[2] = {fine.locate(0, 0.5 * (r[0] + r[2])),
                          fine.locate(1, 0.5 * (r[1] + r[3]))};
            counts[fine.flat(idx)] += 1.0;
        }
    }
    for (int I = 0; I < 3; ++I) {
        for (int Jj = 0; Jj < 3; ++Jj) {
            double acc[4] = {0, 0, 0, 0};
            double n = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    int idx[2] = {2 * I + a, 2 * Jj + b};
                    const std::size_t cf = fine.flat(idx);
                    for (int k = 0; k < 4; ++k)
                        acc[k] += counts[cf] * Kf.tensor(cf)[k];
                    n += counts[cf];
                }
            int idxc[2] = {I, Jj};
            const std::size_t cc = coarse.flat(idxc);
            if (n == 0.0) continue;
            for (int k = 0; k < 4; ++k)
                CHECK(acc[k] / n ==
                      doctest::Approx(Kc.tensor(cc)[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("macro closure: constant density") {
    const auto omega = ConvexDomain::box({{-0.5, 0.5}});
    const ConfigurationDomain conf(omega);
    RGrid xg = RGrid::uniform(1, -0.5, 0.5, 3);
    auto zero = [](const double*, const double*) { return 0.0; };
    const auto K0 = kramers_macro(zero, xg, 1, 1.0, conf, 64);
    for (std::size_t c = 0; c < xg.cells(); ++c) CHECK(K0.tensor(c)[0] == 0.0);

    // constant psi on D = (-1, 1): K = H * int q^2 / int 1 = H / 3
    auto one = [](const double*, const double*) { return 1.0; };
    const auto K = kramers_macro(one, xg, 1, 2.0, conf, 4000);
    for (std::size_t c = 0; c < xg.cells(); ++c)
        CHECK(K.tensor(c)[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("macro closure: truncated Gaussian matches J H beta I") {
    const double beta = 1.0;
    const auto omega = ConvexDomain::box({{-3.25, 3.25}});
    const ConfigurationDomain conf(omega);  // D = (-6.5, 6.5), covers 6 sqrt(beta)
    RGrid xg = RGrid::uniform(1, -3.25, 3.25, 2);

    SUBCASE("single spring") {
        auto psi = [&](const double*, const double* q) {
            return std::exp(-0.5 * q[0] * q[0] / beta);
        };
        const auto K = kramers_macro(psi, xg, 1, 1.0, conf, 2048);
        for (std::size_t c = 0; c < xg.cells(); ++c)
            CHECK(K.tensor(c)[0] == doctest::Approx(beta).epsilon(1e-4));
    }

    SUBCASE("two springs") {
        auto psi = [&](const double*, const double* q) {
            return std::exp(-0.5 * (q[0] * q[0] + q[1] * q[1]) / beta);
        };
        const auto K = kramers_macro(psi, xg, 2, 1.0, conf, 512);
        for (std::size_t c = 0; c < xg.cells(); ++c)
            CHECK(K.tensor(c)[0] == doctest::Approx(2.0 * beta).epsilon(1e-4));
    }
}

TEST_CASE("chain permutation leaves the estimator invariant") {
    auto a = make_ensemble_2d(64, 1.0, 6);
    a.init_positions_uniform();
    auto b = make_ensemble_2d(64, 1.0, 7);
    std::vector<double> r(4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.get_chain(i, r.data(), nullptr);
        b.set_chain(a.size() - 1 - i, r.data(), nullptr);
    }
    RGrid grid = RGrid::uniform(2, -1.0, 1.0, 4);
    const auto Ka = kramers_from_ensemble(a, grid);
    const auto Kb = kramers_from_ensemble(b, grid);
    for (std::size_t c = 0; c < grid.cells(); ++c)
        for (int k = 0; k < 4; ++k)
            CHECK(Ka.tensor(c)[k] == doctest::Approx(Kb.tensor(c)[k]).epsilon(1e-13));
}
