#include "hklab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hklab {

MarkovKernel::MarkovKernel(Matrix p, double tol) : p_(std::move(p)) {
    if (p_.rows() != p_.cols()) throw std::invalid_argument("kernel: matrix not square");
    for (int i = 0; i < p_.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < p_.cols(); ++j) {
            if (p_(i, j) < 0.0) {
                if (p_(i, j) < -tol)
                    throw std::invalid_argument("kernel: negative entry at row " + std::to_string(i));
                p_(i, j) = 0.0;
            }
            s += p_(i, j);
        }
        if (std::abs(s - 1.0) > tol)
            throw std::invalid_argument("kernel: row " + std::to_string(i) +
                                        " sums to " + std::to_string(s));
    }
}

DiscreteMeasure MarkovKernel::row_measure(int i) const {
    Vec w(p_.cols());
    for (int j = 0; j < p_.cols(); ++j) w[j] = p_(i, j);
    return DiscreteMeasure(std::move(w));
}

Vec apply_to_function(const MarkovKernel& p, const Vec& f) {
    return matvec(p.matrix(), f);
}

DiscreteMeasure apply_to_measure(const DiscreteMeasure& mu, const MarkovKernel& p) {
    mu.require_probability(1e-9);
    Vec w = vecmat(mu.weights(), p.matrix());
    return DiscreteMeasure(std::move(w));
}

MarkovKernel compose(const MarkovKernel& p, const MarkovKernel& q) {
    return MarkovKernel(matmul(p.matrix(), q.matrix()), 1e-9);
}

UniformGrid1d UniformGrid1d::from_space(const FiniteMetricSpace& space) {
    if (!space.coords()) throw std::invalid_argument("grid: space carries no coordinates");
    const auto& coords = *space.coords();
    if (coords[0].size() != 1) throw std::invalid_argument("grid: coordinates are not 1-D");
    const int n = space.size();
    if (n < 2) throw std::invalid_argument("grid: need at least 2 nodes");
    const double h = coords[1][0] - coords[0][0];
    if (!(h > 0.0)) throw std::invalid_argument("grid: nodes not increasing");
    for (int i = 1; i < n; ++i) {
        const double step = coords[i][0] - coords[i - 1][0];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, h))
            throw std::invalid_argument("grid: spacing not uniform at node " + std::to_string(i));
    }
    return UniformGrid1d{coords[0][0], h, n};
}

namespace {

MarkovKernel gaussian_rows(const UniformGrid1d& g, const std::function<double(double)>& mean_of,
                           double variance) {
    Matrix p(g.n, g.n, 0.0);
    const double inv2v = 1.0 / (2.0 * variance);
    for (int i = 0; i < g.n; ++i) {
        const double m = mean_of(g.x(i));
        double s = 0.0;
        double* row = p.row(i);
        for (int j = 0; j < g.n; ++j) {
            const double dx = g.x(j) - m;
            row[j] = std::exp(-dx * dx * inv2v);
            s += row[j];
        }
        for (int j = 0; j < g.n; ++j) row[j] /= s;
    }
    return MarkovKernel(std::move(p), 1e-9);
}

}  // namespace

MarkovKernel heat_kernel_grid(const UniformGrid1d& grid, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat kernel: t must be positive");
    return gaussian_rows(grid, [](double x) { return x; }, 2.0 * t);
}

MarkovKernel heat_kernel_grid(const FiniteMetricSpace& grid, double t) {
    return heat_kernel_grid(UniformGrid1d::from_space(grid), t);
}

MarkovKernel ou_kernel_grid(const UniformGrid1d& grid, double t, double a) {
    if (!(t > 0.0)) throw std::invalid_argument("ou kernel: t must be positive");
    if (!(a > 0.0)) throw std::invalid_argument("ou kernel: a must be positive");
    const double decay = std::exp(-a * t);
    const double variance = (1.0 - std::exp(-2.0 * a * t)) / a;
    return gaussian_rows(grid, [decay](double x) { return decay * x; }, variance);
}

MarkovKernel ou_kernel_grid(const FiniteMetricSpace& grid, double t, double a) {
    return ou_kernel_grid(UniformGrid1d::from_space(grid), t, a);
}

DiscreteMeasure bin_samples(const Vec& samples, const UniformGrid1d& grid, long long* clamped) {
    if (samples.empty()) throw std::invalid_argument("bin_samples: empty sample set");
    Vec w(grid.n, 0.0);
    long long out = 0;
    for (double s : samples) {
        int idx = static_cast<int>(std::floor((s - grid.x0) / grid.h + 0.5));
        if (idx < 0) {
            idx = 0;
            ++out;
        } else if (idx >= grid.n) {
            idx = grid.n - 1;
            ++out;
        }
        w[idx] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (double& x : w) x *= inv;
    if (clamped) *clamped += out;
    return DiscreteMeasure(std::move(w));
}

EmpiricalKernelResult empirical_kernel(const std::vector<Vec>& samples_per_start,
                                       const UniformGrid1d& grid) {
    if (static_cast<int>(samples_per_start.size()) != grid.n)
        throw std::invalid_argument("empirical kernel: need one sample set per grid node");
    Matrix p(grid.n, grid.n, 0.0);
    long long clamped = 0;
    for (int i = 0; i < grid.n; ++i) {
        if (samples_per_start[i].empty())
            throw std::invalid_argument("empirical kernel: empty sample set for row " +
                                        std::to_string(i));
        DiscreteMeasure row = bin_samples(samples_per_start[i], grid, &clamped);
        for (int j = 0; j < grid.n; ++j) p(i, j) = row[j];
    }
    return EmpiricalKernelResult{MarkovKernel(std::move(p), 1e-9), clamped};
}

}  // namespace hklab
