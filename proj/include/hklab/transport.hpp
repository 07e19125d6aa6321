#pragma once

#include <string>
#include <vector>

#include "hklab/core.hpp"
#include "hklab/space.hpp"

namespace hklab {

/// Parameters of the W_{a,b} squared-distance family: a weights the gradient
/// term, b the zeroth-order term in the defining differential inequality.
struct WParams {
    double a = 0.0;
    double b = 0.0;

    WParams(double a_, double b_) : a(a_), b(b_) {
        if (a < 0.0 || b < 0.0 || (a == 0.0 && b == 0.0))
            throw std::invalid_argument("W params: need a,b >= 0 and not both zero");
    }
};

/// He_2(mu0, mu1)^2 w.r.t. counting reference measure; value in [0, 2],
/// 2 iff the supports are disjoint.
double hellinger_sq(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

struct OTResult {
    double value = 0.0;
    Matrix coupling;  // optimal transport plan
};

/// Exact optimal transport for an arbitrary nonnegative cost matrix, solved
/// as a min-cost flow by successive shortest paths (no entropic smoothing).
OTResult exact_ot(const Matrix& cost, const Vec& mu0, const Vec& mu1);

/// Same optimum, but when the space embeds in the line and the cost is a
/// convex function of the displacement (d^2, exp(d^2/c), ...) the Monge
/// condition makes the monotone coupling optimal and the march is O(n).
OTResult exact_ot_for_space(const Matrix& cost, const Vec& mu0, const Vec& mu1,
                            const FiniteMetricSpace& space);

/// Exact squared 2-Wasserstein distance (LP with cost d^2) plus an optimal
/// coupling.
OTResult wasserstein2_sq_full(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              const FiniteMetricSpace& space);
double wasserstein2_sq(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                       const FiniteMetricSpace& space);

struct LetOptions {
    double eps_start = 1e-1;
    double eps_end = 1e-4;
    double eps_factor = 0.5;
    int max_inner_iterations = 300;  // per epsilon level; the polish finishes the job
    double marginal_tol = 1e-10;     // sup-norm change of log-potentials
    double target_gap = 1e-5;        // relative primal-dual gap certificate
    bool polish_small = true;        // exact convex descent for n <= polish_max_n
    int polish_max_n = 512;          // coordinate minima are closed forms; cheap
    int polish_iterations = 20000;   // max sweeps, chunked against the gap
};

/// Solution of the logarithmic entropy transport program
///   min_gamma  KL(gamma0|mu0) + KL(gamma1|mu1) + sum gamma_ij l(d_ij),
///   l(d) = -2 ln cos(d ^ pi/2), entries with d >= pi/2 excluded a priori.
struct LETSolution {
    double value = 0.0;        // objective evaluated at `coupling`
    Matrix coupling;
    Vec marginal0, marginal1;  // row/column sums of the coupling
    double gap = kInf;         // certified relative primal-dual gap
    int iterations = 0;
    std::vector<double> epsilon_schedule;
    bool converged = false;    // gap <= target
};

/// cost entry of the LET program; +inf at and beyond pi/2
double let_cost(double d);

/// Evaluates the LET objective at an arbitrary nonnegative coupling.
double let_objective(const Matrix& coupling, const Vec& mu0, const Vec& mu1, const Matrix& cost);

LETSolution let_solve(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                      const FiniteMetricSpace& space, const LetOptions& opts = {});

/// The W_{a,b} family by dispatch: (a>0, b=0) -> W_2^2/(4a);
/// (a=0, b>0) -> He_2^2/b; (a>0, b>0) -> LET on the metric rescaled by
/// sqrt(b)/(2 sqrt(a)), divided by b.
struct WabResult {
    double value = 0.0;
    double gap = 0.0;       // inherited from the LET solve (0 for exact routes)
    bool converged = true;
    std::string route;      // "wasserstein", "hellinger", or "let"
    int iterations = 0;
    std::vector<double> epsilon_schedule;
};

WabResult w_ab_full(const WParams& params, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                    const FiniteMetricSpace& space, const LetOptions& opts = {});
double w_ab(const WParams& params, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
            const FiniteMetricSpace& space, const LetOptions& opts = {});

/// Closed form for W_{a,b} between Dirac measures at distance d (a,b > 0).
double w_ab_dirac(const WParams& params, double d);

struct WFamilyCheckEntry {
    std::string kind;    // "scaling", "monotone", "dirac-bound"
    double lhs = 0.0, rhs = 0.0;
    double violation = 0.0;  // max(0, lhs - rhs)
    std::string detail;
};

struct WFamilyReport {
    std::vector<WFamilyCheckEntry> entries;
    double max_violation = 0.0;
    bool pass = true;
};

/// Exercises the scaling/monotonicity algebra of the family plus the Dirac
/// upper bound on a parameter grid.
WFamilyReport w_family_checks(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              const FiniteMetricSpace& space,
                              const std::vector<WParams>& param_grid, double tol,
                              const LetOptions& opts = {});

}  // namespace hklab
