#include "hklab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hklab {

DivParams::DivParams(double a_, double b_) : a(a_), b(b_) {
    if (a < 0.0) throw std::invalid_argument("T params: a must be >= 0");
    if (!(b > 0.0)) throw std::invalid_argument("T params: b must be > 0");
    p = std::exp(b);
    const double pm1 = std::expm1(b);
    q = p / pm1;
    c_b = std::exp(-std::log(q) + (1.0 - q) * b);
}

DivParams c_b(double b) { return DivParams(0.0, b); }

double young_gap(double b, double z, double w, double x) {
    if (!(z > 0.0) || !(w > 0.0) || !(x > 0.0))
        throw std::invalid_argument("young_gap: arguments must be positive");
    const DivParams d(0.0, b);
    const double bound = d.c_b * std::pow(z, d.q) / std::pow(w, d.q - 1.0);
    return bound - (std::pow(x, 1.0 / d.p) * z - x * w);
}

double gronwall_flow(double b, double r, double y0, double s) {
    if (!(b > 0.0) || r < 0.0 || !(y0 > 0.0) || s < 0.0 || s > 1.0)
        throw std::invalid_argument("gronwall_flow: domain violation");
    const double ebs = std::exp(-b * s);
    return std::exp(r / b * (1.0 - ebs)) * std::pow(y0, ebs);
}

RenyiResult renyi_T0b(const DivParams& params, const DiscreteMeasure& mu0,
                      const DiscreteMeasure& mu1) {
    if (mu0.size() != mu1.size()) throw std::invalid_argument("renyi: dimension mismatch");
    RenyiResult out;
    out.order_q = params.q;
    out.density.assign(mu0.size(), 0.0);
    for (int i = 0; i < mu0.size(); ++i) {
        if (mu0[i] <= 0.0 && mu1[i] > 0.0) {
            out.absolutely_continuous = false;
            out.value = kInf;
            out.t_tilde = kInf;
            return out;
        }
        if (mu0[i] > 0.0) out.density[i] = mu1[i] / mu0[i];
    }
    out.absolutely_continuous = true;
    // log-space sum: t_tilde stays finite even when the value overflows
    Vec terms;
    terms.reserve(mu0.size());
    for (int i = 0; i < mu0.size(); ++i)
        if (mu0[i] > 0.0 && out.density[i] > 0.0)
            terms.push_back(params.q * std::log(out.density[i]) + std::log(mu0[i]));
    const double log_sum = terms.empty() ? -kInf : logsumexp(terms);
    out.t_tilde = log_sum;  // = ln(value / C_b)
    out.value = params.c_b * std::exp(log_sum);
    return out;
}

TUpperResult t_ab_upper_full(const DivParams& params, const DiscreteMeasure& mu0,
                             const DiscreteMeasure& mu1, const FiniteMetricSpace& space,
                             double cost_cap) {
    if (!(params.a > 0.0)) throw std::invalid_argument("t_ab_upper: requires a > 0");
    if (mu0.size() != space.size() || mu1.size() != space.size())
        throw std::invalid_argument("t_ab_upper: dimension mismatch");
    TUpperResult out;
    const int n = space.size();
    const double log_cap = std::log(cost_cap);
    Matrix cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double e = space.dist(i, j) * space.dist(i, j) / (4.0 * params.a * params.b);
            if (e > log_cap) {
                cost(i, j) = cost_cap;
                out.cost_capped = true;
            } else {
                cost(i, j) = std::exp(e);
            }
        }
    OTResult ot = exact_ot_for_space(cost, mu0.weights(), mu1.weights(), space);
    out.value = params.c_b * ot.value;
    out.coupling = std::move(ot.coupling);
    return out;
}

double t_ab_upper(const DivParams& params, const DiscreteMeasure& mu0,
                  const DiscreteMeasure& mu1, const FiniteMetricSpace& space, double cost_cap) {
    return t_ab_upper_full(params, mu0, mu1, space, cost_cap).value;
}

namespace {

// log integral of exp(coef * f^2) (or exp(coef * f) when linear) against mu
double log_exp_integral(const Vec& f, const Vec& mu, double coef, bool linear) {
    Vec terms;
    terms.reserve(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] <= 0.0) continue;
        const double e = linear ? coef * f[i] : coef * f[i] * f[i];
        terms.push_back(std::log(mu[i]) + e);
    }
    return logsumexp(terms);
}

}  // namespace

TLowerResult t_ab_lower(const DivParams& params, const DiscreteMeasure& mu0,
                        const DiscreteMeasure& mu1, const LipschitzDictionary& dictionary) {
    if (mu0.size() != mu1.size()) throw std::invalid_argument("t_ab_lower: dimension mismatch");
    TLowerResult best;
    best.value = params.c_b;  // f = 0 certificate
    best.certificate.f_index = 0;
    best.certificate.k = 0.0;

    // k-grid in [0, 1/(4a)) with endpoint refinement; for a = 0 the formula
    // has no pole and we take the same grid against a nominal scale
    const double k_max = params.a > 0.0 ? 1.0 / (4.0 * params.a) : 4.0;
    std::vector<double> ks;
    for (int j = 0; j < 64; ++j) ks.push_back(k_max * j / 64.0);
    for (int m = 1; m <= 12; ++m) ks.push_back(k_max * (1.0 - std::pow(2.0, -m)));

    for (int fi = 0; fi < dictionary.size(); ++fi) {
        const TestFunction& tf = dictionary[fi];
        Vec f = tf.values;
        if (tf.lip_bound > 0.0)
            for (double& x : f) x /= tf.lip_bound;  // rescale to lip bound 1

        for (double k : ks) {
            if (k == 0.0) continue;  // floor already included
            const double den1 = params.p - 4.0 * params.a * k;
            const double den0 = 1.0 - 4.0 * params.a * k;
            if (std::abs(den1) < 1e-9 || std::abs(den0) < 1e-9) continue;
            const double log_i1 = log_exp_integral(f, mu1.weights(), k * params.b / den1, false);
            const double log_i0 = log_exp_integral(f, mu0.weights(), k * params.b / den0, false);
            const double log_val =
                std::log(params.c_b) + params.q * log_i1 - (params.q - 1.0) * log_i0;
            const double val = std::exp(log_val);
            if (val > best.value && std::isfinite(val)) {
                best.value = val;
                best.certificate = LowerCertificate{fi, k, false, "elem-ineq-optimal"};
            }
        }

        if (params.a == 0.0) {
            // linear-exponent family from the a = 0 corollary, over scales of f
            for (int j = -6; j <= 6; ++j) {
                const double c = std::pow(2.0, j);
                for (double sign : {1.0, -1.0}) {
                    const double scale = sign * c;
                    const double log_i1 =
                        log_exp_integral(f, mu1.weights(), std::exp(-params.b) * scale, true);
                    const double log_i0 = log_exp_integral(f, mu0.weights(), scale, true);
                    const double log_val =
                        std::log(params.c_b) + params.q * log_i1 - (params.q - 1.0) * log_i0;
                    const double val = std::exp(log_val);
                    if (val > best.value && std::isfinite(val)) {
                        best.value = val;
                        best.certificate = LowerCertificate{fi, scale, true, "elem-ineq-optimal"};
                    }
                }
            }
        }
    }
    return best;
}

PointMassBounds t_point_mass_bounds(const DivParams& params, double d) {
    if (!(params.a > 0.0)) throw std::invalid_argument("point-mass bounds: requires a > 0");
    if (d < 0.0) throw std::invalid_argument("point-mass bounds: distance must be >= 0");
    PointMassBounds out;
    const double d2 = d * d;
    out.lower = params.c_b * std::exp(params.b * params.q / (4.0 * params.a * (params.p - 1.0)) * d2);
    out.upper = params.c_b * std::exp(d2 / (4.0 * params.a * params.b));
    return out;
}

CertifiedValue t_ab_bounds(const DivParams& params, const DiscreteMeasure& mu0,
                           const DiscreteMeasure& mu1, const FiniteMetricSpace& space,
                           const LipschitzDictionary& dictionary, double cost_cap) {
    CertifiedValue out;
    TLowerResult lo = t_ab_lower(params, mu0, mu1, dictionary);
    out.lower = lo.value;
    out.lower_certificate = lo.certificate;
    if (params.a > 0.0) {
        TUpperResult hi = t_ab_upper_full(params, mu0, mu1, space, cost_cap);
        out.upper = hi.value;
        out.upper_capped = hi.cost_capped;
        out.upper_certificate = "coupling-lp";
    } else {
        // a = 0: the closed form pins the value; dictionary bound stays below
        RenyiResult r = renyi_T0b(params, mu0, mu1);
        out.upper = r.value;
        out.lower = std::min(out.lower, r.value);
        out.upper_certificate = "renyi-closed-form";
    }
    return out;
}

DualFeasibilityReport verify_dual_feasible(const DivParams& params,
                                           const LowerCertificate& cert,
                                           const LipschitzDictionary& dictionary,
                                           const FiniteMetricSpace& space,
                                           const Vec& time_grid, double tol) {
    if (cert.f_index < 0 || cert.f_index >= dictionary.size())
        throw std::invalid_argument("verify_dual_feasible: malformed certificate");
    const TestFunction& tf = dictionary[cert.f_index];
    Vec f = tf.values;
    if (tf.lip_bound > 0.0)
        for (double& x : f) x /= tf.lip_bound;

    const double a = params.a, b = params.b, k = cert.k;
    const double beta0 = 0.0;  // feasibility does not depend on beta0

    Vec fsq(f.size());
    for (size_t i = 0; i < f.size(); ++i) fsq[i] = f[i] * f[i];
    const Vec grad_fsq = discrete_gradient(space, fsq);
    const Vec grad_f = discrete_gradient(space, f);

    DualFeasibilityReport rep;
    rep.tol = tol;
    for (double s : time_grid) {
        double alpha, dalpha, grad_coef;
        if (cert.linear_family) {
            alpha = k * std::exp(-b * s);
            dalpha = -b * alpha;
        } else {
            const double den = std::exp(b * s) - 4.0 * a * k;
            if (std::abs(den) < 1e-12) {
                rep.max_violation = kInf;
                rep.worst_time = s;
                rep.feasible = false;
                return rep;
            }
            alpha = k * b / den;
            dalpha = -k * b * b * std::exp(b * s) / (den * den);
        }
        const double beta = beta0 * std::exp(-b * s);
        const double dbeta = -b * beta;
        for (size_t i = 0; i < f.size(); ++i) {
            const double base = cert.linear_family ? f[i] : fsq[i];
            const double log_phi = alpha * base + beta;
            const double phi = std::exp(log_phi);
            grad_coef = cert.linear_family ? std::abs(alpha) * grad_f[i]
                                           : std::abs(alpha) * grad_fsq[i];
            const double expr =
                phi * (dalpha * base + dbeta + a * grad_coef * grad_coef + b * log_phi);
            if (expr > rep.max_violation) {
                rep.max_violation = expr;
                rep.worst_point = static_cast<int>(i);
                rep.worst_time = s;
            }
        }
    }
    rep.feasible = rep.max_violation <= tol;
    return rep;
}

}  // namespace hklab
