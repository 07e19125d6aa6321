#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hklab/transport.hpp"
#include "oracles.hpp"

using namespace hklab;

namespace {

FiniteMetricSpace random_points_space(int n, Rng& rng, double scale = 1.0) {
    std::vector<Vec> coords(n);
    for (int i = 0; i < n; ++i) coords[i] = {scale * rng.uniform(-1.0, 1.0),
                                             scale * rng.uniform(-1.0, 1.0)};
    return make_euclidean_space(coords, 0.0);
}

DiscreteMeasure random_probability(int n, Rng& rng) {
    Vec w(n);
    double s = 0.0;
    for (double& x : w) {
        x = rng.uniform(0.05, 1.0);
        s += x;
    }
    for (double& x : w) x /= s;
    return DiscreteMeasure(std::move(w));
}

}  // namespace

TEST_CASE("hellinger squared") {
    SUBCASE("coincident measures give zero, disjoint give two") {
        DiscreteMeasure a(Vec{0.5, 0.5, 0.0});
        DiscreteMeasure b(Vec{0.0, 0.0, 1.0});
        CHECK(hellinger_sq(a, a) == 0.0);
        CHECK(hellinger_sq(a, b) == doctest::Approx(2.0));
    }
    SUBCASE("two-term hand value") {
        DiscreteMeasure a(Vec{1.0, 0.0});
        DiscreteMeasure b(Vec{0.5, 0.5});
        CHECK(hellinger_sq(a, b) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("vanishes iff equal (exhaustive on a small simplex grid)") {
        const int steps = 20;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) {
                DiscreteMeasure a(Vec{i / double(steps), 1.0 - i / double(steps)});
                DiscreteMeasure b(Vec{j / double(steps), 1.0 - j / double(steps)});
                if (i == j)
                    CHECK(hellinger_sq(a, b) == 0.0);
                else
                    CHECK(hellinger_sq(a, b) > 0.0);
            }
    }
}

TEST_CASE("exact wasserstein") {
    SUBCASE("dirac pair gives the squared distance") {
        auto space = make_two_point_space(1.7);
        const double v = wasserstein2_sq(DiscreteMeasure::dirac(0, 2),
                                         DiscreteMeasure::dirac(1, 2), space);
        CHECK(v == doctest::Approx(1.7 * 1.7).epsilon(1e-12));
    }
    SUBCASE("equal measures give zero with diagonal coupling") {
        auto space = make_grid_space(5, 1.0, 0.0);
        DiscreteMeasure mu(Vec{0.1, 0.2, 0.4, 0.2, 0.1});
        auto res = wasserstein2_sq_full(mu, mu, space);
        CHECK(res.value == doctest::Approx(0.0));
        for (int i = 0; i < 5; ++i) CHECK(res.coupling(i, i) == doctest::Approx(mu[i]));
    }
    SUBCASE("single-variable hand LP") {
        auto space = make_two_point_space(1.0);
        DiscreteMeasure mu0(Vec{0.75, 0.25});
        DiscreteMeasure mu1(Vec{0.25, 0.75});
        CHECK(wasserstein2_sq(mu0, mu1, space) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("general LP, monotone fast path, and quantile oracle agree in 1-D") {
        Rng rng(17);
        auto space = make_grid_space(40, 0.25, -5.0);
        Vec xs(40);
        Matrix cost(40, 40);
        for (int i = 0; i < 40; ++i) {
            xs[i] = (*space.coords())[i][0];
            for (int j = 0; j < 40; ++j)
                cost(i, j) = space.dist(i, j) * space.dist(i, j);
        }
        for (int trial = 0; trial < 10; ++trial) {
            auto mu0 = random_probability(40, rng);
            auto mu1 = random_probability(40, rng);
            const double lp = exact_ot(cost, mu0.weights(), mu1.weights()).value;
            const double fast = wasserstein2_sq(mu0, mu1, space);
            const double qt = oracles::w2_sq_quantile(xs, mu0.weights(), mu1.weights());
            CHECK(lp == doctest::Approx(qt).epsilon(1e-9));
            CHECK(fast == doctest::Approx(qt).epsilon(1e-9));
        }
    }
    SUBCASE("uniform marginals: LP value equals the best assignment") {
        // with uniform marginals the transportation optimum sits on a
        // permutation (Birkhoff), so brute force over 4! permutations is an
        // exact oracle for arbitrary costs
        Rng rng(19);
        for (int trial = 0; trial < 20; ++trial) {
            Matrix cost(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) cost(i, j) = rng.uniform(0.0, 5.0);
            const Vec uniform(4, 0.25);
            const double lp = exact_ot(cost, uniform, uniform).value;
            std::vector<int> perm{0, 1, 2, 3};
            double best = kInf;
            do {
                double v = 0.0;
                for (int i = 0; i < 4; ++i) v += cost(i, perm[i]);
                best = std::min(best, v);
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(lp == doctest::Approx(best * 0.25).epsilon(1e-10));
        }
    }
    SUBCASE("symmetry and optimal coupling marginals") {
        Rng rng(23);
        auto space = random_points_space(12, rng);
        auto mu0 = random_probability(12, rng);
        auto mu1 = random_probability(12, rng);
        auto res = wasserstein2_sq_full(mu0, mu1, space);
        CHECK(res.value == doctest::Approx(wasserstein2_sq(mu1, mu0, space)).epsilon(1e-9));
        for (int i = 0; i < 12; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < 12; ++j) {
                r += res.coupling(i, j);
                c += res.coupling(j, i);
            }
            CHECK(r == doctest::Approx(mu0[i]).epsilon(1e-9));
            CHECK(c == doctest::Approx(mu1[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("let cost and objective conventions") {
    CHECK(let_cost(0.0) == 0.0);
    CHECK(let_cost(1.0) == doctest::Approx(-2.0 * std::log(std::cos(1.0))));
    CHECK(std::isinf(let_cost(1.5707963267948966)));
    CHECK(std::isinf(let_cost(3.0)));
}

TEST_CASE("let solver against closed forms") {
    SUBCASE("dirac pair below the cutoff: 2 - 2 cos d") {
        for (double d : {0.25, 0.7, 1.0471975511965976 /* pi/3 */, 1.4}) {
            auto space = make_two_point_space(d);
            auto sol = let_solve(DiscreteMeasure::dirac(0, 2), DiscreteMeasure::dirac(1, 2),
                                 space);
            CHECK(sol.converged);
            CHECK(sol.value == doctest::Approx(2.0 - 2.0 * std::cos(d)).epsilon(1e-5));
        }
    }
    SUBCASE("dirac pair at or beyond pi/2: pure creation, value 2") {
        for (double d : {1.5707963267948966, 2.0, 3.0}) {
            auto space = make_two_point_space(d);
            auto sol = let_solve(DiscreteMeasure::dirac(0, 2), DiscreteMeasure::dirac(1, 2),
                                 space);
            CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-9));
        }
    }
    SUBCASE("equal measures give zero with the diagonal coupling") {
        auto space = make_grid_space(6, 0.2, 0.0);
        DiscreteMeasure mu(Vec{0.1, 0.15, 0.25, 0.25, 0.15, 0.1});
        auto sol = let_solve(mu, mu, space);
        CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-8));
        for (int i = 0; i < 6; ++i)
            CHECK(sol.coupling(i, i) == doctest::Approx(mu[i]).epsilon(1e-4));
    }
    SUBCASE("reported value is reproducible from the coupling") {
        Rng rng(31);
        auto space = random_points_space(6, rng);
        auto mu0 = random_probability(6, rng);
        auto mu1 = random_probability(6, rng);
        auto sol = let_solve(mu0, mu1, space);
        Matrix cost(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) cost(i, j) = let_cost(space.dist(i, j));
        const double replay = let_objective(sol.coupling, mu0.weights(), mu1.weights(), cost);
        CHECK(replay == doctest::Approx(sol.value).epsilon(1e-6));
        CHECK(sol.gap >= 0.0);
        CHECK(sol.gap <= 1e-5);
    }
    SUBCASE("a deliberately crude configuration reports non-convergence") {
        auto space = make_two_point_space(1.0);
        LetOptions crude;
        crude.eps_end = 0.05;
        crude.polish_small = false;
        auto sol = let_solve(DiscreteMeasure(Vec{0.3, 0.7}), DiscreteMeasure(Vec{0.6, 0.4}),
                             space, crude);
        CHECK(!sol.converged);
        CHECK(sol.gap > 1e-5);
    }
    SUBCASE("brute-force oracle on random 2- and 3-point spaces") {
        Rng rng(47);
        for (int trial = 0; trial < 6; ++trial) {
            const int n = trial % 2 == 0 ? 2 : 3;
            auto space = random_points_space(n, rng);
            auto mu0 = random_probability(n, rng);
            auto mu1 = random_probability(n, rng);
            auto sol = let_solve(mu0, mu1, space);
            const double oracle = oracles::let_brute_force(mu0.weights(), mu1.weights(), space);
            CHECK(sol.value ==
                  doctest::Approx(oracle).epsilon(1e-4).scale(std::max(oracle, 1e-9)));
        }
    }
}

TEST_CASE("w_ab dispatch and the dirac closed form") {
    SUBCASE("interior dirac value a=1/2, b=2 at d = pi/3") {
        // closed form: (1/b)(2 - 2cos(sqrt(b)/(2 sqrt(a)) d ^ pi/2)), scale 1
        const double d = 1.0471975511965976;
        auto space = make_two_point_space(d);
        const double expected = 0.5 * (2.0 - 2.0 * std::cos(d));
        const double v = w_ab(WParams(0.5, 2.0), DiscreteMeasure::dirac(0, 2),
                              DiscreteMeasure::dirac(1, 2), space);
        CHECK(v == doctest::Approx(expected).epsilon(1e-4));
        CHECK(w_ab_dirac(WParams(0.5, 2.0), d) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("clamp boundary a=1/2, b=2 at d = pi/2 saturates") {
        auto space = make_two_point_space(1.5707963267948966);
        const double v = w_ab(WParams(0.5, 2.0), DiscreteMeasure::dirac(0, 2),
                              DiscreteMeasure::dirac(1, 2), space);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("saturation at 2/b for distant diracs") {
        auto space = make_two_point_space(10.0);
        const double v = w_ab(WParams(0.5, 2.0), DiscreteMeasure::dirac(0, 2),
                              DiscreteMeasure::dirac(1, 2), space);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("b = 0 reduces to wasserstein, a = 0 to hellinger") {
        auto space = make_two_point_space(2.0);
        auto d0 = DiscreteMeasure::dirac(0, 2);
        auto d1 = DiscreteMeasure::dirac(1, 2);
        CHECK(w_ab(WParams(0.5, 0.0), d0, d1, space) == doctest::Approx(2.0));  // W2^2/2
        CHECK(w_ab(WParams(0.0, 1.0), d0, d1, space) == doctest::Approx(2.0));  // He2^2
        CHECK(w_ab(WParams(0.0, 4.0), d0, d1, space) == doctest::Approx(0.5));
    }
    SUBCASE("identical measures give zero for any parameters") {
        auto space = make_grid_space(4, 0.3, 0.0);
        auto mu = DiscreteMeasure::uniform(4);
        for (auto [a, b] : {std::pair<double, double>{0.5, 2.0}, {1.0, 1.0}, {2.0, 0.1}})
            CHECK(w_ab(WParams(a, b), mu, mu, space) == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("family checks: scaling, monotonicity, dirac bound") {
        Rng rng(61);
        auto space = random_points_space(5, rng);
        auto mu0 = random_probability(5, rng);
        auto mu1 = random_probability(5, rng);
        std::vector<WParams> grid{{0.25, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 2.0}};
        auto rep = w_family_checks(mu0, mu1, space, grid, 1e-4);
        CHECK(rep.pass);

        auto d0 = DiscreteMeasure::dirac(0, 5);
        auto d1 = DiscreteMeasure::dirac(3, 5);
        auto rep2 = w_family_checks(d0, d1, space, grid, 1e-4);
        CHECK(rep2.pass);
    }
}
