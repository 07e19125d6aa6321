#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hklab/core.hpp"
#include "hklab/markov.hpp"
#include "hklab/space.hpp"

namespace hklab {

/// Drift potential for the Langevin SDE dX = -grad U dt + sqrt(2) dB.
struct Potential {
    std::function<double(double)> u;
    std::function<double(double)> grad_u;
    std::string name;
};

Potential quadratic_potential(double a);     // U(x) = a x^2 / 2
Potential quartic_potential(double lambda);  // U(x) = lambda x^4 / 4
/// Arithmetic expression in x (e.g. "x^2/2 + 0.1*cos(x)"); the gradient is a
/// central finite difference.
Potential user_potential(const std::string& expression);

struct LangevinConfig {
    Potential potential;
    double convexity = 0.0;   // declared lower bound on U''
    double step = 1e-3;       // Euler-Maruyama step h
    double horizon = 1.0;     // final time T
    int paths = 100000;       // N
    uint64_t seed = 0;
    int threads = 1;
    double blowup_guard = 1e6;   // |X| beyond this aborts the path
    double reflect_box = 0.0;    // > 0: reflecting boundary at |x| = box

    void validate() const;
};

/// Endpoint clouds per start per checkpoint; noise scaling sqrt(2h) per step
/// (generator Delta, matching the grid kernels' variance convention).
struct SimulationResult {
    std::vector<std::vector<Vec>> samples;  // [start][checkpoint][path]
    long long aborted = 0;
    long long reflected = 0;
};

SimulationResult simulate_langevin(const LangevinConfig& config, const Vec& starts,
                                   const Vec& checkpoint_times);

/// A weighted list of start atoms (position, mass).
using AtomicMeasure = std::vector<std::pair<double, double>>;

struct DecaySeries {
    Vec times;
    Vec values;
    Vec stderrs;
    Vec envelopes;
    double stat_tol = 0.0;
    bool pass = false;
    std::string note;
};

/// W2^2(nu0 P_t, nu1 P_t) against the envelope e^{-2at} W2^2(nu0, nu1),
/// with endpoint clouds binned to a shared grid of at most 512 cells.
DecaySeries w2_decay_experiment(const LangevinConfig& config, const AtomicMeasure& nu0,
                                const AtomicMeasure& nu1, const Vec& times, double stat_tol);

/// He2^2(delta_x P_t, mu) against (1/(4t)) W2^2(delta_x, mu), with the
/// equilibrium mu computed by grid quadrature of e^{-U}.
DecaySeries hellinger_decay_experiment(const LangevinConfig& config, double start,
                                       const Vec& times, double stat_tol);

struct QuasiCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct QuasiInvarianceReport {
    std::vector<QuasiCheck> checks;
    bool hellinger_vacuous = false;      // d^2/(4t) >= 2
    int subdivision_steps = 0;           // n of the n-step argument, when vacuous
    std::vector<double> subdivision_he2; // per-step He2^2, each must stay < 2
    bool pass = false;
    double grid_h = 0.0;
    int grid_n = 0;
};

/// Finite-dimensional Gaussian quasi-invariance checks between mu_t and its
/// shift by d, where mu_t is the centered normal of variance t discretized on
/// a grid (built from heat_kernel_grid at time t/2):
///   (i)  T_{0,2k/t}(mu_t, mu_t^d) <= C_b exp(t d^2 / (8 k^2)) per kappa,
///   (ii) the Renyi functional vs the weak bound and the exact value,
///   (iii) He2^2 <= d^2/(4t), with the n-step subdivision demo when vacuous.
QuasiInvarianceReport gaussian_quasi_invariance(double t, double d, const Vec& kappa_grid,
                                                const Vec& p_grid, double h = 0.01,
                                                double rel_tol = 1e-2);

}  // namespace hklab
