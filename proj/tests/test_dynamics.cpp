#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hklab/dynamics.hpp"
#include "hklab/gaussian.hpp"
#include "hklab/markov.hpp"
#include "hklab/transport.hpp"

using namespace hklab;

TEST_CASE("gaussian closed-form oracle sub-library") {
    SUBCASE("hellinger between equal normals is zero, grows with the shift") {
        CHECK(gaussian::hellinger_sq(0.0, 1.0, 0.0, 1.0) == doctest::Approx(0.0));
        CHECK(gaussian::hellinger_sq(0.0, 1.0, 1.0, 1.0) ==
              doctest::Approx(2.0 * (1.0 - std::exp(-1.0 / 8.0))).epsilon(1e-12));
    }
    SUBCASE("w2 between normals") {
        CHECK(gaussian::wasserstein2_sq(0.0, 1.0, 2.0, 1.0) == doctest::Approx(4.0));
        CHECK(gaussian::wasserstein2_sq(0.0, 4.0, 0.0, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("renyi between equal-variance normals: r d^2 / (2v)") {
        CHECK(gaussian::renyi_divergence(0.0, 0.5, 1.0, 0.5, 2.0) ==
              doctest::Approx(2.0 * 1.0 / (2.0 * 0.5)).epsilon(1e-12));
    }
    SUBCASE("renyi against the grid pipeline at 1% on h = 0.01") {
        const double t = 0.5, d = 1.0, q = 2.0;
        const int n = 1401;
        auto space = make_grid_space(n, 0.01, -7.0);
        auto kernel = heat_kernel_grid(space, t / 2.0);  // variance t rows
        const int x = 700, y = 800;  // shift d = 1
        double sum = 0.0;
        for (int z = 0; z < n; ++z)
            if (kernel(x, z) > 0.0)
                sum += std::pow(kernel(y, z) / kernel(x, z), q) * kernel(x, z);
        const double grid_dq = std::log(sum) / (q - 1.0);
        const double exact_dq = gaussian::renyi_divergence(0.0, t, d, t, q);
        CHECK(grid_dq == doctest::Approx(exact_dq).epsilon(0.01));
    }
    SUBCASE("grid hellinger and w2 match the oracle at 1%") {
        // h = 0.04 here to keep the exact LP quick; the acceptance suite
        // repeats the pipeline validation at h = 0.01
        const double t = 0.5, d = 1.0;
        const int n = 351;
        auto space = make_grid_space(n, 0.04, -7.0);
        auto kernel = heat_kernel_grid(space, t / 2.0);
        auto mu0 = kernel.row_measure(175);
        auto mu1 = kernel.row_measure(200);
        CHECK(hellinger_sq(mu0, mu1) ==
              doctest::Approx(gaussian::hellinger_sq(0.0, t, d, t)).epsilon(0.01));
        CHECK(wasserstein2_sq(mu0, mu1, space) ==
              doctest::Approx(gaussian::wasserstein2_sq(0.0, t, d, t)).epsilon(0.01));
    }
}

TEST_CASE("potentials") {
    SUBCASE("user expression parser matches the quadratic built-in") {
        auto q = quadratic_potential(1.0);
        auto u = user_potential("x^2/2");
        for (double x : {-2.0, -0.5, 0.0, 1.3, 4.0}) {
            CHECK(u.u(x) == doctest::Approx(q.u(x)).epsilon(1e-12));
            CHECK(u.grad_u(x) == doctest::Approx(q.grad_u(x)).epsilon(1e-6));
        }
    }
    SUBCASE("parser handles composite expressions") {
        auto u = user_potential("0.25*x^4 - cos(2*x) + exp(-x^2)");
        CHECK(u.u(1.0) == doctest::Approx(0.25 - std::cos(2.0) + std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("malformed expressions throw") {
        CHECK_THROWS_AS(user_potential("x +"), std::invalid_argument);
        CHECK_THROWS_AS(user_potential("foo(x)"), std::invalid_argument);
        CHECK_THROWS_AS(user_potential("(x"), std::invalid_argument);
    }
}

TEST_CASE("langevin simulation") {
    SUBCASE("config validation") {
        LangevinConfig bad;
        bad.potential = quadratic_potential(1.0);
        bad.paths = 10;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }
    SUBCASE("fixed seed reproduces the samples bit for bit") {
        LangevinConfig cfg;
        cfg.potential = quadratic_potential(1.0);
        cfg.step = 1e-2;
        cfg.horizon = 0.1;
        cfg.paths = 1000;
        cfg.seed = 9;
        auto a = simulate_langevin(cfg, {0.0}, {0.05, 0.1});
        auto b = simulate_langevin(cfg, {0.0}, {0.05, 0.1});
        CHECK(a.samples == b.samples);
    }
    SUBCASE("free motion: one-step increment variance is 2h") {
        LangevinConfig cfg;
        cfg.potential = quadratic_potential(0.0);
        cfg.step = 1e-2;
        cfg.horizon = 1e-2;
        cfg.paths = 100000;
        cfg.seed = 4;
        auto sim = simulate_langevin(cfg, {0.0}, {1e-2});
        const Vec& cloud = sim.samples[0][0];
        double var = 0.0;
        for (double v : cloud) var += v * v;
        var /= cloud.size();
        const double expect = 2.0 * cfg.step;
        const double band = 3.0 * expect * std::sqrt(2.0 / cfg.paths);
        CHECK(std::abs(var - expect) < band);
    }
    SUBCASE("quadratic potential relaxes to unit variance") {
        LangevinConfig cfg;
        cfg.potential = quadratic_potential(1.0);
        cfg.convexity = 1.0;
        cfg.step = 1e-3;
        cfg.horizon = 2.0;
        cfg.paths = 20000;
        cfg.seed = 5;
        auto sim = simulate_langevin(cfg, {0.0}, {2.0});
        const Vec& cloud = sim.samples[0][0];
        double mean = 0.0, var = 0.0;
        for (double v : cloud) mean += v;
        mean /= cloud.size();
        for (double v : cloud) var += (v - mean) * (v - mean);
        var /= cloud.size();
        CHECK(var == doctest::Approx(1.0 - std::exp(-4.0)).epsilon(0.03));
    }
    SUBCASE("reflecting box keeps quartic paths inside and reports it") {
        LangevinConfig cfg;
        cfg.potential = quartic_potential(1.0);
        cfg.step = 1e-2;
        cfg.horizon = 0.5;
        cfg.paths = 2000;
        cfg.seed = 6;
        cfg.reflect_box = 1.0;
        auto sim = simulate_langevin(cfg, {0.9}, {0.5});
        CHECK(sim.reflected > 0);
        for (double v : sim.samples[0][0]) CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("w2 decay experiment (reduced scale)") {
    LangevinConfig cfg;
    cfg.potential = quadratic_potential(1.0);
    cfg.convexity = 1.0;
    cfg.step = 1e-3;
    cfg.paths = 20000;
    cfg.seed = 11;
    cfg.horizon = 0.5;
    AtomicMeasure nu0{{0.0, 1.0}};
    AtomicMeasure nu1{{1.0, 1.0}};

    SUBCASE("envelope holds with statistical slack") {
        auto series = w2_decay_experiment(cfg, nu0, nu1, {0.25, 0.5}, 0.10);
        CHECK(series.pass);
        for (size_t i = 0; i < series.times.size(); ++i) {
            CHECK(series.envelopes[i] ==
                  doctest::Approx(std::exp(-2.0 * series.times[i])).epsilon(1e-12));
            CHECK(series.values[i] <= series.envelopes[i] * 1.10 + 1e-12);
        }
    }
    SUBCASE("coincident starts give a vanishing series") {
        auto series = w2_decay_experiment(cfg, nu0, nu0, {0.25}, 0.10);
        CHECK(series.values[0] < 1e-3);
    }
    SUBCASE("declaring a too-large rate falsifies the envelope") {
        LangevinConfig wrong = cfg;
        wrong.convexity = 2.0;  // truth is 1
        auto series = w2_decay_experiment(wrong, nu0, nu1, {0.5}, 0.10);
        CHECK(!series.pass);
    }
}

TEST_CASE("hellinger decay experiment (reduced scale)") {
    LangevinConfig cfg;
    cfg.potential = quadratic_potential(1.0);
    cfg.convexity = 0.0;  // only convexity >= 0 is needed here
    cfg.step = 1e-3;
    cfg.paths = 20000;
    cfg.seed = 12;
    cfg.horizon = 4.0;

    auto series = hellinger_decay_experiment(cfg, 1.0, {0.25, 0.5, 1.0, 4.0}, 0.10);
    CHECK(series.pass);
    // cross-check the t = 0.25 value against the gaussian oracle
    const double m = std::exp(-0.25), v = 1.0 - std::exp(-0.5);
    const double oracle = gaussian::hellinger_sq(m, v, 0.0, 1.0);
    CHECK(series.values[0] == doctest::Approx(oracle).epsilon(0.05));
    CHECK(series.values.back() < 0.05);
}

TEST_CASE("gaussian quasi-invariance bundle") {
    SUBCASE("t = 0.5, d = 1: all checks pass, renyi functional hits e^2") {
        auto rep = gaussian_quasi_invariance(0.5, 1.0, {0.25, 0.5, 1.0, 2.0}, {1.5, 2.0, 3.0},
                                             0.01);
        CHECK(rep.pass);
        CHECK(!rep.hellinger_vacuous);
        bool saw_exact = false;
        for (const auto& c : rep.checks) {
            if (c.name.rfind("renyi-functional=exact p=2.0", 0) == 0) {
                saw_exact = true;
                CHECK(c.lhs == doctest::Approx(std::exp(2.0)).epsilon(0.01));
                CHECK(c.rhs == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
            }
        }
        CHECK(saw_exact);
    }
    SUBCASE("d = 0 sits at the trivial floors") {
        auto rep = gaussian_quasi_invariance(0.5, 0.0, {1.0}, {2.0}, 0.02);
        CHECK(rep.pass);
        for (const auto& c : rep.checks)
            if (c.name.rfind("hellinger", 0) == 0) CHECK(c.lhs == doctest::Approx(0.0));
    }
    SUBCASE("large shift flags vacuity and demonstrates the n-step subdivision") {
        auto rep = gaussian_quasi_invariance(0.5, 4.0, {1.0}, {2.0}, 0.02);
        CHECK(rep.hellinger_vacuous);
        CHECK(rep.subdivision_steps == 3);  // ceil(4 / sqrt(2))
        CHECK(static_cast<int>(rep.subdivision_he2.size()) == rep.subdivision_steps);
        for (double v : rep.subdivision_he2) CHECK(v < 2.0 - 1e-6);
        CHECK(rep.pass);
    }
}
