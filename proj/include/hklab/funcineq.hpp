#pragma once

#include <map>
#include <string>
#include <vector>

#include "hklab/core.hpp"
#include "hklab/divergence.hpp"
#include "hklab/markov.hpp"
#include "hklab/space.hpp"
#include "hklab/transport.hpp"

namespace hklab {

/// Dictionary supremum of a functional-inequality quotient.  The reported
/// value is a lower bound on the true constant; the witness reproduces it.
struct ConstantEstimate {
    double value = 0.0;
    bool defined = false;       // false when every denominator was excluded
    Vec witness_function;       // the function achieving the reported quotient
    int witness_point = -1;
    long long excluded = 0;     // denominators below the threshold
    std::vector<std::pair<int, double>> convergence;  // dictionary prefix -> estimate
};

struct EstimatorOptions {
    double exclusion_factor = 1e-10;  // times oscillation^2
    int ascent_sweeps = 2;            // coordinate-ascent refinement rounds (rpi)
    std::vector<double> ascent_steps = {0.2, 0.05};  // times oscillation
    std::vector<double> rlsi_scales = {0.25, 0.5, 1.0, 2.0};
    int threads = 1;
};

/// Quotient evaluations at a point, shared by the estimators and the
/// witness-reproducibility checks.  NaN when the denominator vanishes.
double rpi_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space, const Vec& f, int x);
double rlsi_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space, const Vec& positive_f,
                        int x);
double grad_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space, const Vec& f, int x);

/// sup |grad Pf|^2 / (P(f^2) - (Pf)^2) over the dictionary, with
/// coordinate-ascent refinement from each seed.
ConstantEstimate rpi_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                              const LipschitzDictionary& dict, const EstimatorOptions& opts = {});

/// Same estimator through the weak form |grad Pf|^2 <= C P(f^2) after
/// recentering f by Pf(x); agrees with rpi_constant by the self-improvement.
ConstantEstimate rpi_constant_weak(const MarkovKernel& p, const FiniteMetricSpace& space,
                                   const LipschitzDictionary& dict,
                                   const EstimatorOptions& opts = {});

/// sup Pf |grad ln Pf|^2 / (P(f ln f) - Pf ln Pf) over exp-mapped dictionary.
ConstantEstimate rlsi_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                               const LipschitzDictionary& dict, const EstimatorOptions& opts = {});

/// sup |grad Pf|^2 / P(|grad f|^2).
ConstantEstimate gradient_bound_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                                         const LipschitzDictionary& dict,
                                         const EstimatorOptions& opts = {});

struct HarnessReport {
    std::string id;
    long long trials = 0;
    long long skipped = 0;
    double tol = 0.0;
    double max_violation = -kInf;  // > 0 means the inequality broke
    std::map<std::string, double> worst_case;
    bool pass = false;
};

/// Pf(x) <= Pf(y) + sqrt(C) d(x,y) sqrt(P(f^2)(x)) over nonnegative samples.
HarnessReport hpi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const LipschitzDictionary& dict, int trials, uint64_t seed, double tol);

/// |Pf(x)-Pf(y)|^2 <= 2 He2^2(dx P, dy P) (P(f^2)(x)+P(f^2)(y)), unconditional.
HarnessReport increment_lemma_check(const MarkovKernel& p, const FiniteMetricSpace& space,
                                    const LipschitzDictionary& dict, int trials, uint64_t seed,
                                    double tol);

/// Full chain He2^2(mu0 P, mu1 P) <= W_{1/C,1}(mu0,mu1) <= (C/4) W2^2(mu0,mu1).
HarnessReport hkc_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                          const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                          double rel_tol, const LetOptions& let_opts = {});

/// Necessary consequence of the entropic transportation-cost inequality:
/// T_{0,kC}(mu0 P, mu1 P) (exact) <= upper bound of T_{k,kC}(mu0, mu1).
HarnessReport eti_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                          const Vec& kappa_grid,
                          const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                          double rel_tol);

/// Pf(x)^p <= exp(p/(p-1) C d(x,y)^2/4) P(f^p)(y) over positive samples.
HarnessReport whi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const Vec& p_grid, const LipschitzDictionary& dict, int trials,
                        uint64_t seed, double tol);

/// sum_z (p_x/p_y)^{1/(p-1)} p_x <= exp(p/(p-1)^2 C d(x,y)^2/4) per point pair.
HarnessReport ihi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const Vec& p_grid, const std::vector<std::pair<int, int>>& point_pairs,
                        double tol);

/// W2^2(mu0 P, mu1 P) <= C W2^2(mu0, mu1).
HarnessReport kuwada_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                             const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                             double rel_tol);

}  // namespace hklab
