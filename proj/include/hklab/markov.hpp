#pragma once

#include <vector>

#include "hklab/core.hpp"
#include "hklab/space.hpp"

namespace hklab {

/// Row-stochastic transition matrix acting on functions (right) and
/// measures (left).
class MarkovKernel {
public:
    explicit MarkovKernel(Matrix p, double tol = 1e-10);

    int size() const { return p_.rows(); }
    const Matrix& matrix() const { return p_; }
    double operator()(int i, int j) const { return p_(i, j); }

    /// row i as a measure (delta_i P)
    DiscreteMeasure row_measure(int i) const;

private:
    Matrix p_;
};

/// (Pf)[i] = sum_j P[i][j] f[j]
Vec apply_to_function(const MarkovKernel& p, const Vec& f);

/// (mu P)[j] = sum_i mu[i] P[i][j]
DiscreteMeasure apply_to_measure(const DiscreteMeasure& mu, const MarkovKernel& p);

MarkovKernel compose(const MarkovKernel& p, const MarkovKernel& q);

/// Uniform 1-D lattice view of a space built from 1-D coordinates.
struct UniformGrid1d {
    double x0 = 0.0;
    double h = 0.0;
    int n = 0;

    double x(int i) const { return x0 + i * h; }

    /// Detects a uniform 1-D lattice from the space's coordinates; throws if
    /// the space has none or the spacing is not uniform.
    static UniformGrid1d from_space(const FiniteMetricSpace& space);

    static FiniteMetricSpace make_space(int n, double h, double x0) {
        return make_grid_space(n, h, x0);
    }
};

/// Heat semigroup row i: Gaussian with mean x_i and variance 2t, renormalized
/// on the lattice.  The variance convention 2t matches the generator Delta
/// with Gamma(f) = |grad f|^2; the constants 1/(2t) and 2/t used downstream
/// depend on it.
MarkovKernel heat_kernel_grid(const FiniteMetricSpace& grid, double t);
MarkovKernel heat_kernel_grid(const UniformGrid1d& grid, double t);

/// Ornstein-Uhlenbeck (Mehler) row i: Gaussian with mean e^{-at} x_i and
/// variance (1 - e^{-2at})/a, for the generator Delta - a x . grad.
MarkovKernel ou_kernel_grid(const FiniteMetricSpace& grid, double t, double a);
MarkovKernel ou_kernel_grid(const UniformGrid1d& grid, double t, double a);

struct EmpiricalKernelResult {
    MarkovKernel kernel;
    long long clamped = 0;  // endpoint samples outside the grid hull
};

/// Bins per-start endpoint samples onto grid cells (cell-midpoint binning,
/// out-of-hull samples clamped to the boundary cells and counted).
EmpiricalKernelResult empirical_kernel(const std::vector<Vec>& samples_per_start,
                                       const UniformGrid1d& grid);

/// Histogram of one sample cloud on the grid, normalized to a probability
/// measure; shares the clamping rule with empirical_kernel.
DiscreteMeasure bin_samples(const Vec& samples, const UniformGrid1d& grid, long long* clamped);

}  // namespace hklab
