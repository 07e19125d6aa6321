#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hklab/markov.hpp"

using namespace hklab;

namespace {

MarkovKernel two_state() {
    Matrix p(2, 2);
    p(0, 0) = 0.5;
    p(0, 1) = 0.5;
    p(1, 0) = 0.25;
    p(1, 1) = 0.75;
    return MarkovKernel(std::move(p));
}

double row_tv(const MarkovKernel& a, const MarkovKernel& b) {
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.size(); ++j) s += std::abs(a(i, j) - b(i, j));
        worst = std::max(worst, 0.5 * s);
    }
    return worst;
}

}  // namespace

TEST_CASE("kernel validation") {
    Matrix bad(2, 2, 0.3);
    CHECK_THROWS_AS(MarkovKernel{bad}, std::invalid_argument);
    Matrix neg(1, 1, 1.0);
    CHECK_NOTHROW(MarkovKernel{neg});
}

TEST_CASE("kernel actions") {
    auto p = two_state();

    SUBCASE("constants are preserved") {
        Vec f{1.0, 1.0};
        Vec pf = apply_to_function(p, f);
        CHECK(pf[0] == doctest::Approx(1.0));
        CHECK(pf[1] == doctest::Approx(1.0));
    }
    SUBCASE("hand-checked matrix-vector product") {
        Vec pf = apply_to_function(p, Vec{0.0, 1.0});
        CHECK(pf[0] == doctest::Approx(0.5));
        CHECK(pf[1] == doctest::Approx(0.75));
    }
    SUBCASE("point mass maps to the corresponding row") {
        auto out = apply_to_measure(DiscreteMeasure::dirac(0, 2), p);
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.5));
    }
    SUBCASE("uniform measure, hand computation") {
        auto out = apply_to_measure(DiscreteMeasure::uniform(2), p);
        CHECK(out[0] == doctest::Approx(0.375));
        CHECK(out[1] == doctest::Approx(0.625));
    }
    SUBCASE("duality between the two actions") {
        DiscreteMeasure mu(Vec{0.3, 0.7});
        Vec f{0.2, -1.4};
        auto muP = apply_to_measure(mu, p);
        Vec pf = apply_to_function(p, f);
        double lhs = 0.0, rhs = 0.0;
        for (int i = 0; i < 2; ++i) {
            lhs += muP[i] * f[i];
            rhs += mu[i] * pf[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    SUBCASE("sup-norm contraction and Jensen, random kernels") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 8;
            Matrix m(n, n);
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) {
                    m(i, j) = rng.uniform(0.0, 1.0);
                    s += m(i, j);
                }
                for (int j = 0; j < n; ++j) m(i, j) /= s;
            }
            MarkovKernel k(std::move(m));
            Vec f(n), f2(n);
            for (int i = 0; i < n; ++i) {
                f[i] = rng.uniform(-3.0, 3.0);
                f2[i] = f[i] * f[i];
            }
            Vec pf = apply_to_function(k, f);
            Vec pf2 = apply_to_function(k, f2);
            CHECK(max_abs(pf) <= max_abs(f) + 1e-12);
            for (int i = 0; i < n; ++i) CHECK(pf2[i] - pf[i] * pf[i] >= -1e-12);
        }
    }
}

TEST_CASE("heat kernel on a grid") {
    auto grid = UniformGrid1d{-3.0, 0.05, 121};

    SUBCASE("tiny time is nearly the identity") {
        const double h = grid.h;
        auto p = heat_kernel_grid(grid, h * h / 100.0);
        double off = 0.0;
        for (int i = 0; i < p.size(); ++i)
            for (int j = 0; j < p.size(); ++j)
                if (i != j) off = std::max(off, p(i, j));
        CHECK(off < 1e-6);
    }
    SUBCASE("reflection symmetry of the symmetric grid") {
        auto p = heat_kernel_grid(grid, 0.1);
        const int n = p.size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(p(i, j) == doctest::Approx(p(n - 1 - i, n - 1 - j)).epsilon(1e-12));
    }
    SUBCASE("row variance approximates 2t") {
        const double t = 0.125;  // radius 3 >= 6 sqrt(2t) = 3
        auto p = heat_kernel_grid(grid, t);
        const int mid = 60;
        double var = 0.0;
        for (int j = 0; j < p.size(); ++j) {
            const double dx = grid.x(j) - grid.x(mid);
            var += p(mid, j) * dx * dx;
        }
        CHECK(var == doctest::Approx(2.0 * t).epsilon(0.01));
    }
    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(heat_kernel_grid(grid, 0.0), std::invalid_argument);
        auto cloud = make_euclidean_space({{0.0}, {0.3}, {0.4}}, 0.0);
        CHECK_THROWS_AS(heat_kernel_grid(cloud, 0.1), std::invalid_argument);
    }
}

TEST_CASE("ornstein-uhlenbeck kernel") {
    auto grid = UniformGrid1d{-6.0, 0.05, 241};
    const double a = 1.0;

    SUBCASE("long time reaches the discretized stationary row") {
        auto p = ou_kernel_grid(grid, 20.0 / a, a);
        auto stationary = ou_kernel_grid(grid, 21.0 / a, a);
        CHECK(row_tv(p, stationary) < 1e-8);
        // all rows nearly identical
        double worst = 0.0;
        for (int j = 0; j < p.size(); ++j) worst = std::max(worst, std::abs(p(0, j) - p(p.size() - 1, j)));
        CHECK(worst < 1e-8);
    }
    SUBCASE("short-time mean matches (1 - at) x") {
        const double t = 0.01;
        auto p = ou_kernel_grid(grid, t, a);
        const int i = 40;  // x = -4
        double mean = 0.0;
        for (int j = 0; j < p.size(); ++j) mean += p(i, j) * grid.x(j);
        const double x = grid.x(i);
        CHECK(std::abs(mean - (1.0 - a * t) * x) < 2.0 * (a * t) * (a * t) * std::abs(x) + 1e-6);
    }
    SUBCASE("semigroup property within grid tolerance") {
        auto p1 = ou_kernel_grid(grid, 0.3, a);
        auto p2 = ou_kernel_grid(grid, 0.2, a);
        auto direct = ou_kernel_grid(grid, 0.5, a);
        auto composed = compose(p1, p2);
        // rows whose 6-sigma support fits the grid; edge rows renormalize
        // away up to ~1% of their mass and are excluded
        double worst = 0.0;
        for (int i = 80; i < 161; ++i) {  // |x| <= 2
            double s = 0.0;
            for (int j = 0; j < direct.size(); ++j)
                s += std::abs(composed(i, j) - direct(i, j));
            worst = std::max(worst, 0.5 * s);
        }
        CHECK(worst < 1e-6);
    }
    SUBCASE("composition stays row-stochastic") {
        auto p1 = ou_kernel_grid(grid, 0.3, a);
        auto c = compose(p1, p1);
        for (int i = 0; i < c.size(); ++i) {
            double s = 0.0;
            for (int j = 0; j < c.size(); ++j) s += c(i, j);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("empirical kernel binning") {
    auto grid = UniformGrid1d{0.0, 1.0, 5};

    SUBCASE("samples at the start point give the identity") {
        std::vector<Vec> samples(5);
        for (int i = 0; i < 5; ++i) samples[i] = Vec(10, grid.x(i));
        auto res = empirical_kernel(samples, grid);
        for (int i = 0; i < 5; ++i) CHECK(res.kernel(i, i) == doctest::Approx(1.0));
        CHECK(res.clamped == 0);
    }
    SUBCASE("clamping is counted") {
        std::vector<Vec> samples(5, Vec{0.0});
        samples[2] = Vec{-3.0, 7.5, 2.0};
        auto res = empirical_kernel(samples, grid);
        CHECK(res.clamped == 2);
    }
    SUBCASE("empty sample set is an error") {
        std::vector<Vec> samples(5, Vec{0.0});
        samples[3].clear();
        CHECK_THROWS_AS(empirical_kernel(samples, grid), std::invalid_argument);
    }
    SUBCASE("monte-carlo rows approach the heat kernel rows") {
        auto g = UniformGrid1d{-4.0, 0.05, 161};
        const double t = 0.125;
        Rng rng(123);
        const int start = 80;  // x = 0
        Vec cloud(100000);
        for (double& v : cloud) v = g.x(start) + std::sqrt(2.0 * t) * rng.normal();
        long long clamped = 0;
        auto binned = bin_samples(cloud, g, &clamped);
        auto exact = heat_kernel_grid(g, t);
        double tv = 0.0;
        for (int j = 0; j < g.n; ++j) tv += std::abs(binned[j] - exact(start, j));
        CHECK(tv * 0.5 < 0.02);
    }
}
