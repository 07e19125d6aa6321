#include "hklab/funcineq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hklab {

namespace {

double oscillation(const Vec& f) {
    double lo = kInf, hi = -kInf;
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

Vec squared(const Vec& f) {
    Vec g(f.size());
    for (size_t i = 0; i < f.size(); ++i) g[i] = f[i] * f[i];
    return g;
}

Vec xlogx(const Vec& f) {
    Vec g(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) throw std::invalid_argument("rlsi: function must be positive");
        g[i] = f[i] * std::log(f[i]);
    }
    return g;
}

struct ScanResult {
    double value = -kInf;
    int point = -1;
    long long excluded = 0;
};

// best quotient over points given precomputed numerator/denominator fields
ScanResult scan(const Vec& num, const Vec& den, double threshold) {
    ScanResult r;
    for (size_t i = 0; i < num.size(); ++i) {
        if (den[i] < threshold) {
            ++r.excluded;
            continue;
        }
        const double q = num[i] / den[i];
        if (q > r.value) {
            r.value = q;
            r.point = static_cast<int>(i);
        }
    }
    return r;
}

// estimate-vs-dictionary-size curve at power-of-two prefixes
void append_convergence(ConstantEstimate& est, const std::vector<double>& per_function) {
    const int total = static_cast<int>(per_function.size());
    double running = -kInf;
    for (int size = 1;; size *= 2) {
        const int upto = std::min(size, total);
        for (int k = size / 2; k < upto; ++k) running = std::max(running, per_function[k]);
        est.convergence.emplace_back(upto, running == -kInf ? 0.0 : running);
        if (size >= total) break;
    }
}

}  // namespace

double rpi_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space, const Vec& f,
                       int x) {
    const Vec pf = apply_to_function(p, f);
    const Vec pf2 = apply_to_function(p, squared(f));
    const Vec g = discrete_gradient(space, pf);
    const double den = pf2[x] - pf[x] * pf[x];
    return g[x] * g[x] / den;
}

double rlsi_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space,
                        const Vec& positive_f, int x) {
    const Vec pf = apply_to_function(p, positive_f);
    const Vec pent = apply_to_function(p, xlogx(positive_f));
    Vec logpf(pf.size());
    for (size_t i = 0; i < pf.size(); ++i) logpf[i] = std::log(pf[i]);
    const Vec g = discrete_gradient(space, logpf);
    const double den = pent[x] - pf[x] * logpf[x];
    return pf[x] * g[x] * g[x] / den;
}

double grad_quotient_at(const MarkovKernel& p, const FiniteMetricSpace& space, const Vec& f,
                        int x) {
    const Vec pf = apply_to_function(p, f);
    const Vec gpf = discrete_gradient(space, pf);
    Vec gf = discrete_gradient(space, f);
    for (double& v : gf) v *= v;
    const Vec den = apply_to_function(p, gf);
    return gpf[x] * gpf[x] / den[x];
}

namespace {

struct SeedResult {
    double value = -kInf;
    int point = -1;
    long long excluded = 0;
    Vec witness;
};

// dictionary-seed evaluation with coordinate-ascent refinement; per-seed work
// is independent, so seeds run in parallel and merge in index order
SeedResult rpi_from_seed(const MarkovKernel& p, const FiniteMetricSpace& space, Vec f,
                         const EstimatorOptions& opts) {
    const int n = space.size();
    SeedResult out;
    double osc = oscillation(f);
    if (osc <= 0.0) return out;

    Vec pf = apply_to_function(p, f);
    Vec pf2 = apply_to_function(p, squared(f));
    auto ratio_scan = [&](const Vec& pf_, const Vec& pf2_, double osc_) {
        Vec g = discrete_gradient(space, pf_);
        Vec num(n), den(n);
        for (int i = 0; i < n; ++i) {
            num[i] = g[i] * g[i];
            den[i] = pf2_[i] - pf_[i] * pf_[i];
        }
        return scan(num, den, opts.exclusion_factor * osc_ * osc_);
    };

    ScanResult best = ratio_scan(pf, pf2, osc);
    out.excluded = best.excluded;

    // single-coordinate bumps with O(n) incremental updates of Pf and P(f^2)
    for (int sweep = 0; sweep < opts.ascent_sweeps; ++sweep) {
        bool improved = false;
        for (double step_frac : opts.ascent_steps) {
            const double step = step_frac * osc;
            for (int i = 0; i < n; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    const double delta = sgn * step;
                    Vec pf_t = pf, pf2_t = pf2;
                    for (int x = 0; x < n; ++x) {
                        const double col = p(x, i);
                        pf_t[x] += delta * col;
                        pf2_t[x] += (2.0 * delta * f[i] + delta * delta) * col;
                    }
                    const double osc_t = std::max(osc, std::abs(f[i] + delta - (f[i] - osc)));
                    ScanResult cand = ratio_scan(pf_t, pf2_t, osc_t);
                    if (cand.point >= 0 && cand.value > best.value * (1.0 + 1e-12)) {
                        best = cand;
                        f[i] += delta;
                        pf = std::move(pf_t);
                        pf2 = std::move(pf2_t);
                        osc = oscillation(f);
                        improved = true;
                    }
                }
            }
        }
        if (!improved) break;
    }

    if (best.point >= 0) {
        out.value = best.value;
        out.point = best.point;
        out.witness = std::move(f);
    }
    return out;
}

}  // namespace

ConstantEstimate rpi_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                              const LipschitzDictionary& dict, const EstimatorOptions& opts) {
    ConstantEstimate est;
    std::vector<SeedResult> results(dict.size());
    parallel_for(dict.size(), opts.threads, [&](int fi) {
        results[fi] = rpi_from_seed(p, space, dict[fi].values, opts);
    });

    std::vector<double> per_function(dict.size(), -kInf);
    for (int fi = 0; fi < dict.size(); ++fi) {
        const SeedResult& r = results[fi];
        est.excluded += r.excluded;
        per_function[fi] = r.point >= 0 ? r.value : -kInf;
        if (r.point >= 0 && (!est.defined || r.value > est.value)) {
            est.value = r.value;
            est.defined = true;
            est.witness_function = r.witness;
            est.witness_point = r.point;
        }
    }

    append_convergence(est, per_function);
    return est;
}

ConstantEstimate rpi_constant_weak(const MarkovKernel& p, const FiniteMetricSpace& space,
                                   const LipschitzDictionary& dict,
                                   const EstimatorOptions& opts) {
    const int n = space.size();
    ConstantEstimate est;
    for (int fi = 0; fi < dict.size(); ++fi) {
        const Vec& f0 = dict[fi].values;
        const double osc = oscillation(f0);
        if (osc <= 0.0) continue;
        const Vec pf = apply_to_function(p, f0);
        const double threshold = opts.exclusion_factor * osc * osc;
        for (int x = 0; x < n; ++x) {
            // recenter by Pf(x) and evaluate the weak-form quotient at x
            Vec fx(f0);
            for (double& v : fx) v -= pf[x];
            const Vec pfx = apply_to_function(p, fx);
            const Vec pfx2 = apply_to_function(p, squared(fx));
            const Vec g = discrete_gradient(space, pfx);
            if (pfx2[x] < threshold) {
                ++est.excluded;
                continue;
            }
            const double q = g[x] * g[x] / pfx2[x];
            if (!est.defined || q > est.value) {
                est.value = q;
                est.defined = true;
                est.witness_function = fx;
                est.witness_point = x;
            }
        }
    }
    return est;
}

ConstantEstimate rlsi_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                               const LipschitzDictionary& dict, const EstimatorOptions& opts) {
    const int n = space.size();
    ConstantEstimate est;
    std::vector<SeedResult> results(dict.size());

    parallel_for(dict.size(), opts.threads, [&](int fi) {
        const Vec& f = dict[fi].values;
        SeedResult out;
        if (oscillation(f) <= 0.0 && fi > 0) {
            results[fi] = out;
            return;
        }
        for (double scale : opts.rlsi_scales) {
            Vec g(n);
            for (int i = 0; i < n; ++i) g[i] = std::exp(scale * f[i]);
            const double osc = oscillation(g);
            if (osc <= 0.0) continue;
            const Vec pg = apply_to_function(p, g);
            const Vec pent = apply_to_function(p, xlogx(g));
            Vec logpg(n);
            for (int i = 0; i < n; ++i) logpg[i] = std::log(pg[i]);
            const Vec gr = discrete_gradient(space, logpg);
            Vec num(n), den(n);
            for (int i = 0; i < n; ++i) {
                num[i] = pg[i] * gr[i] * gr[i];
                den[i] = pent[i] - pg[i] * logpg[i];
            }
            ScanResult sr = scan(num, den, opts.exclusion_factor * osc * osc);
            out.excluded += sr.excluded;
            if (sr.point >= 0 && sr.value > out.value) {
                out.value = sr.value;
                out.point = sr.point;
                out.witness = std::move(g);
            }
        }
        results[fi] = std::move(out);
    });

    std::vector<double> per_function(dict.size(), -kInf);
    for (int fi = 0; fi < dict.size(); ++fi) {
        const SeedResult& r = results[fi];
        est.excluded += r.excluded;
        per_function[fi] = r.point >= 0 ? r.value : -kInf;
        if (r.point >= 0 && (!est.defined || r.value > est.value)) {
            est.value = r.value;
            est.defined = true;
            est.witness_function = r.witness;
            est.witness_point = r.point;
        }
    }

    append_convergence(est, per_function);
    return est;
}

ConstantEstimate gradient_bound_constant(const MarkovKernel& p, const FiniteMetricSpace& space,
                                         const LipschitzDictionary& dict,
                                         const EstimatorOptions& opts) {
    const int n = space.size();
    ConstantEstimate est;
    std::vector<SeedResult> results(dict.size());

    parallel_for(dict.size(), opts.threads, [&](int fi) {
        const Vec& f = dict[fi].values;
        SeedResult out;
        Vec gf = discrete_gradient(space, f);
        double gmax = 0.0;
        for (double& v : gf) {
            v *= v;
            gmax = std::max(gmax, v);
        }
        if (gmax <= 0.0) {
            results[fi] = out;
            return;
        }
        const Vec pf = apply_to_function(p, f);
        const Vec gpf = discrete_gradient(space, pf);
        const Vec den = apply_to_function(p, gf);
        Vec num(n);
        for (int i = 0; i < n; ++i) num[i] = gpf[i] * gpf[i];
        ScanResult sr = scan(num, den, opts.exclusion_factor * gmax);
        out.excluded = sr.excluded;
        if (sr.point >= 0) {
            out.value = sr.value;
            out.point = sr.point;
            out.witness = f;
        }
        results[fi] = std::move(out);
    });

    std::vector<double> per_function(dict.size(), -kInf);
    for (int fi = 0; fi < dict.size(); ++fi) {
        const SeedResult& r = results[fi];
        est.excluded += r.excluded;
        per_function[fi] = r.point >= 0 ? r.value : -kInf;
        if (r.point >= 0 && (!est.defined || r.value > est.value)) {
            est.value = r.value;
            est.defined = true;
            est.witness_function = r.witness;
            est.witness_point = r.point;
        }
    }

    append_convergence(est, per_function);
    return est;
}

// ---------------------------------------------------------------------------
// harnesses
// ---------------------------------------------------------------------------

HarnessReport hpi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const LipschitzDictionary& dict, int trials, uint64_t seed, double tol) {
    if (!(c > 0.0)) throw std::invalid_argument("hpi: constant must be positive");
    const int n = space.size();
    HarnessReport rep;
    rep.id = "hpi";
    rep.tol = tol;
    const double sc = std::sqrt(c);

    // Sample family: nonnegative shifts of the dictionary entries plus level
    //-set indicators of each (the inequality is over all bounded f >= 0, and
    // sharp configurations are step-like).
    std::vector<Vec> pfs, pf2s;
    std::vector<int> findex;
    auto add_sample = [&](Vec f, int tag) {
        pfs.push_back(apply_to_function(p, f));
        pf2s.push_back(apply_to_function(p, squared(f)));
        findex.push_back(tag);
    };
    for (int fi = 0; fi < dict.size(); ++fi) {
        Vec f = dict[fi].values;
        double lo = kInf, hi = -kInf;
        for (double v : f) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (double& v : f) v -= lo;
        add_sample(f, fi);
        if (hi - lo <= 0.0) continue;
        for (double level : {0.25, 0.5, 0.75}) {
            Vec ind(n);
            const double cut = level * (hi - lo);
            for (int i = 0; i < n; ++i) ind[i] = f[i] >= cut ? 1.0 : 0.0;
            add_sample(std::move(ind), fi);
        }
    }

    Rng rng(seed);
    auto run_trial = [&](int fslot, int x, int y) {
        const Vec& pf = pfs[fslot];
        const Vec& pf2 = pf2s[fslot];
        const double viol = pf[x] - pf[y] - sc * space.dist(x, y) * std::sqrt(pf2[x]);
        ++rep.trials;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_case = {{"f", static_cast<double>(findex[fslot])},
                              {"x", static_cast<double>(x)},
                              {"y", static_cast<double>(y)}};
        }
    };
    // deterministic candidates: extreme points and adjacent pairs around the
    // middle (tight for step-like f), then random fill
    std::vector<std::pair<int, int>> candidates;
    const std::vector<int> corners = {0, n / 4, n / 2, 3 * n / 4, n - 1};
    for (int x : corners)
        for (int y : corners) candidates.emplace_back(x, y);
    for (int base : corners)
        for (int dx = -2; dx <= 2; ++dx)
            for (int dy = -2; dy <= 2; ++dy) {
                const int x = std::clamp(base + dx, 0, n - 1);
                const int y = std::clamp(base + dy, 0, n - 1);
                candidates.emplace_back(x, y);
            }
    for (size_t s = 0; s < pfs.size(); ++s)
        for (auto [x, y] : candidates) run_trial(static_cast<int>(s), x, y);
    while (rep.trials < trials)
        run_trial(rng.uniform_int(static_cast<int>(pfs.size())), rng.uniform_int(n),
                  rng.uniform_int(n));
    rep.pass = rep.max_violation <= tol;
    return rep;
}

HarnessReport increment_lemma_check(const MarkovKernel& p, const FiniteMetricSpace& space,
                                    const LipschitzDictionary& dict, int trials, uint64_t seed,
                                    double tol) {
    const int n = space.size();
    HarnessReport rep;
    rep.id = "increment";
    rep.tol = tol;

    // He2^2 between rows, cached per pair on demand
    Matrix he(n, n, -1.0);
    auto he2 = [&](int x, int y) {
        if (he(x, y) >= 0.0) return he(x, y);
        double s = 0.0;
        for (int z = 0; z < n; ++z) {
            const double d = std::sqrt(p(x, z)) - std::sqrt(p(y, z));
            s += d * d;
        }
        he(x, y) = he(y, x) = s;
        return s;
    };

    Rng rng(seed);
    std::vector<Vec> fs;
    for (int fi = 0; fi < dict.size(); ++fi) fs.push_back(dict[fi].values);
    for (int extra = 0; extra < 8; ++extra) {
        Vec f(n);
        for (int i = 0; i < n; ++i) f[i] = rng.uniform(-1.0, 1.0);  // bounded, not Lipschitz
        fs.push_back(std::move(f));
    }
    std::vector<Vec> pfs, pf2s;
    for (const Vec& f : fs) {
        pfs.push_back(apply_to_function(p, f));
        pf2s.push_back(apply_to_function(p, squared(f)));
    }

    for (int t = 0; t < trials; ++t) {
        const int s = rng.uniform_int(static_cast<int>(fs.size()));
        const int x = rng.uniform_int(n);
        const int y = rng.uniform_int(n);
        const double lhs = (pfs[s][x] - pfs[s][y]) * (pfs[s][x] - pfs[s][y]);
        const double rhs = 2.0 * he2(x, y) * (pf2s[s][x] + pf2s[s][y]);
        const double viol = lhs - rhs;
        ++rep.trials;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_case = {{"f", static_cast<double>(s)},
                              {"x", static_cast<double>(x)},
                              {"y", static_cast<double>(y)}};
        }
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

HarnessReport hkc_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                          const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                          double rel_tol, const LetOptions& let_opts) {
    if (!(c > 0.0)) throw std::invalid_argument("hkc: constant must be positive");
    HarnessReport rep;
    rep.id = "hkc";
    rep.tol = rel_tol;
    const double floor = 1e-8;  // absolute guard for identically-zero chains
    const WParams wp(1.0 / c, 1.0);
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& [mu0, mu1] = pairs[k];
        const DiscreteMeasure push0 = apply_to_measure(mu0, p);
        const DiscreteMeasure push1 = apply_to_measure(mu1, p);
        const double he = hellinger_sq(push0, push1);
        const WabResult let = w_ab_full(wp, mu0, mu1, space, let_opts);
        const double w2 = wasserstein2_sq(mu0, mu1, space) * c / 4.0;
        const double slack = rel_tol + std::max(0.0, let.gap);
        const double v1 =
            (he - let.value * (1.0 + slack) - floor) / std::max(let.value, floor);
        const double v2 = (let.value - w2 * (1.0 + slack) - floor) / std::max(w2, floor);
        rep.trials += 1;
        for (auto [which, v] : {std::pair<int, double>{1, v1}, {2, v2}}) {
            if (v > rep.max_violation) {
                rep.max_violation = v;
                rep.worst_case = {{"pair", static_cast<double>(k)},
                                  {"link", static_cast<double>(which)},
                                  {"he2", he},
                                  {"w_let", let.value},
                                  {"w2_scaled", w2}};
            }
        }
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

namespace {

int dirac_index_of(const DiscreteMeasure& mu) {
    int idx = -1;
    for (int i = 0; i < mu.size(); ++i) {
        if (mu[i] > 1.0 - 1e-12)
            idx = i;
        else if (mu[i] > 1e-12)
            return -1;
    }
    return idx;
}

}  // namespace

HarnessReport eti_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                          const Vec& kappa_grid,
                          const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                          double rel_tol) {
    if (!(c > 0.0)) throw std::invalid_argument("eti: constant must be positive");
    HarnessReport rep;
    rep.id = "eti";
    rep.tol = rel_tol;
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& [mu0, mu1] = pairs[k];
        const DiscreteMeasure push0 = apply_to_measure(mu0, p);
        const DiscreteMeasure push1 = apply_to_measure(mu1, p);
        for (double kappa : kappa_grid) {
            const double b = kappa * c;
            const DivParams zero_params(0.0, b);
            const DivParams full_params(kappa, b);
            // log-space comparison: both sides can overflow for distant pairs
            const RenyiResult lhs = renyi_T0b(zero_params, push0, push1);
            const double lhs_log = std::log(zero_params.c_b) + lhs.t_tilde;
            double rhs_log;
            const int i0 = dirac_index_of(mu0), i1 = dirac_index_of(mu1);
            if (i0 >= 0 && i1 >= 0) {
                const double d = space.dist(i0, i1);
                rhs_log = std::log(full_params.c_b) +
                          d * d / (4.0 * full_params.a * full_params.b);
            } else {
                rhs_log = std::log(t_ab_upper(full_params, mu0, mu1, space));
            }
            ++rep.trials;
            double v;
            if (std::isinf(lhs_log) && std::isfinite(rhs_log)) {
                v = kInf;  // support mismatch bug signal
            } else {
                const double margin = rhs_log + std::log1p(rel_tol) - lhs_log;
                v = margin >= 0.0 ? -std::min(700.0, margin)
                                  : std::expm1(std::min(700.0, -margin)) *
                                        std::exp(std::min(700.0, rhs_log));
            }
            if (v > rep.max_violation) {
                rep.max_violation = v;
                rep.worst_case = {{"pair", static_cast<double>(k)},
                                  {"kappa", kappa},
                                  {"lhs_log", lhs_log},
                                  {"rhs_log", rhs_log}};
            }
        }
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

HarnessReport whi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const Vec& p_grid, const LipschitzDictionary& dict, int trials,
                        uint64_t seed, double tol) {
    if (!(c > 0.0)) throw std::invalid_argument("whi: constant must be positive");
    for (double pp : p_grid)
        if (!(pp > 1.0)) throw std::invalid_argument("whi: p grid must lie in (1, inf)");
    const int n = space.size();
    HarnessReport rep;
    rep.id = "whi";
    rep.tol = tol;

    // Positive sample family: exp(scale * f) for dictionary entries.  Both
    // sides of the inequality are p-homogeneous in f, so each sample is
    // normalized to maximum 1; that keeps the values in (0, 1] and makes the
    // additive tolerance meaningful.
    struct Sample {
        Vec log_pf;                 // ln Pf
        std::vector<Vec> log_pfp;   // ln P(f^p) per grid p
        int f_index;
        double scale;
    };
    std::vector<Sample> samples;
    const std::vector<double> scales = {0.5, 1.0, 2.0};
    for (int fi = 0; fi < dict.size(); ++fi) {
        double top = -kInf;
        for (double v : dict[fi].values) top = std::max(top, v);
        for (double scale : scales) {
            Sample s;
            s.f_index = fi;
            s.scale = scale;
            Vec f(n), fp(n);
            for (int i = 0; i < n; ++i) f[i] = std::exp(scale * (dict[fi].values[i] - top));
            Vec pf = apply_to_function(p, f);
            s.log_pf.resize(n);
            for (int i = 0; i < n; ++i) s.log_pf[i] = std::log(pf[i]);
            for (double pp : p_grid) {
                for (int i = 0; i < n; ++i)
                    fp[i] = std::exp(pp * scale * (dict[fi].values[i] - top));
                Vec pfp = apply_to_function(p, fp);
                Vec lg(n);
                for (int i = 0; i < n; ++i) lg[i] = std::log(pfp[i]);
                s.log_pfp.push_back(std::move(lg));
            }
            samples.push_back(std::move(s));
        }
    }

    Rng rng(seed);
    auto run_trial = [&](int slot, int pi, int x, int y) {
        const Sample& s = samples[slot];
        const double pp = p_grid[pi];
        const double d = space.dist(x, y);
        const double lhs_log = pp * s.log_pf[x];
        const double rhs_log = pp / (pp - 1.0) * c * d * d / 4.0 + s.log_pfp[pi][y];
        ++rep.trials;
        double viol;
        if (lhs_log <= rhs_log) {
            viol = -std::min(700.0, rhs_log - lhs_log);  // comfortable pass margin
        } else {
            const double diff = std::min(700.0, lhs_log - rhs_log);
            viol = std::expm1(diff) * std::exp(std::min(700.0, rhs_log));
        }
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_case = {{"f", static_cast<double>(s.f_index)}, {"scale", s.scale},
                              {"p", pp},  {"x", static_cast<double>(x)},
                              {"y", static_cast<double>(y)}};
        }
    };

    // full deterministic sweep over corner pairs for every sample, then
    // random tuples up to the requested trial count
    const std::vector<int> corners = {0, n / 4, n / 2, 3 * n / 4, n - 1};
    for (size_t s = 0; s < samples.size(); ++s)
        for (size_t pi = 0; pi < p_grid.size(); ++pi)
            for (int x : corners)
                for (int y : corners) run_trial(static_cast<int>(s), static_cast<int>(pi), x, y);
    while (rep.trials < trials)
        run_trial(rng.uniform_int(static_cast<int>(samples.size())),
                  rng.uniform_int(static_cast<int>(p_grid.size())), rng.uniform_int(n),
                  rng.uniform_int(n));
    rep.pass = rep.max_violation <= tol;
    return rep;
}

HarnessReport ihi_check(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                        const Vec& p_grid, const std::vector<std::pair<int, int>>& point_pairs,
                        double tol) {
    if (!(c > 0.0)) throw std::invalid_argument("ihi: constant must be positive");
    const int n = space.size();
    HarnessReport rep;
    rep.id = "ihi";
    rep.tol = tol;
    Vec terms;
    for (const auto& [x, y] : point_pairs) {
        for (double pp : p_grid) {
            bool skip = false;
            terms.clear();
            for (int z = 0; z < n; ++z) {
                const double px = p(x, z), py = p(y, z);
                if (px <= 0.0) continue;
                if (py <= 0.0) {
                    skip = true;
                    break;
                }
                // log of (px/py)^{1/(p-1)} px; summed stably below
                terms.push_back((std::log(px) - std::log(py)) / (pp - 1.0) + std::log(px));
            }
            if (skip) {
                ++rep.skipped;
                continue;
            }
            const double lhs_log = logsumexp(terms);
            const double d = space.dist(x, y);
            const double rhs_log = pp / ((pp - 1.0) * (pp - 1.0)) * c * d * d / 4.0;
            ++rep.trials;
            const double margin = rhs_log - lhs_log;
            const double viol = margin >= 0.0
                                    ? -std::min(700.0, margin)
                                    : std::expm1(std::min(700.0, -margin)) *
                                          std::exp(std::min(700.0, rhs_log));
            if (viol > rep.max_violation) {
                rep.max_violation = viol;
                rep.worst_case = {{"x", static_cast<double>(x)},
                                  {"y", static_cast<double>(y)},
                                  {"p", pp},
                                  {"lhs", std::exp(std::min(700.0, lhs_log))},
                                  {"rhs", std::exp(std::min(700.0, rhs_log))}};
            }
        }
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

HarnessReport kuwada_harness(const MarkovKernel& p, const FiniteMetricSpace& space, double c,
                             const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                             double rel_tol) {
    if (!(c > 0.0)) throw std::invalid_argument("kuwada: constant must be positive");
    HarnessReport rep;
    rep.id = "kuwada";
    rep.tol = rel_tol;
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& [mu0, mu1] = pairs[k];
        const double before = wasserstein2_sq(mu0, mu1, space);
        const double after =
            wasserstein2_sq(apply_to_measure(mu0, p), apply_to_measure(mu1, p), space);
        const double rhs = c * before;
        ++rep.trials;
        const double v = (after - rhs * (1.0 + rel_tol) - 1e-8) / std::max(rhs, 1e-8);
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_case = {{"pair", static_cast<double>(k)},
                              {"w2_before", before},
                              {"w2_after", after}};
        }
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

}  // namespace hklab
