#pragma once

#include <cmath>
#include <stdexcept>

// Closed forms for 1-D normal distributions.  These are the independent
// oracle against which the grid pipeline is validated end to end.

namespace hklab::gaussian {

/// He_2(N(m0,v0), N(m1,v1))^2 = 2 (1 - BC) with the Bhattacharyya coefficient.
inline double hellinger_sq(double m0, double v0, double m1, double v1) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("gaussian: variance must be > 0");
    const double d = m1 - m0;
    const double bc = std::sqrt(2.0 * std::sqrt(v0 * v1) / (v0 + v1)) *
                      std::exp(-d * d / (4.0 * (v0 + v1)));
    return 2.0 * (1.0 - bc);
}

/// W_2(N(m0,v0), N(m1,v1))^2 = (m0-m1)^2 + (sqrt(v0)-sqrt(v1))^2.
inline double wasserstein2_sq(double m0, double v0, double m1, double v1) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("gaussian: variance must be > 0");
    const double dm = m0 - m1;
    const double ds = std::sqrt(v0) - std::sqrt(v1);
    return dm * dm + ds * ds;
}

/// Renyi divergence D_r(N(m1,v1) || N(m0,v0)) for r > 0, r != 1, defined when
/// the mixed variance r v0 + (1-r) v1 is positive.
inline double renyi_divergence(double m0, double v0, double m1, double v1, double r) {
    if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("gaussian: variance must be > 0");
    if (!(r > 0.0) || r == 1.0) throw std::invalid_argument("gaussian: order must be > 0, != 1");
    const double vr = r * v0 + (1.0 - r) * v1;
    if (!(vr > 0.0)) throw std::invalid_argument("gaussian: mixed variance not positive");
    const double d = m1 - m0;
    return r * d * d / (2.0 * vr) +
           1.0 / (2.0 * (r - 1.0)) * std::log(std::pow(v0, r) * std::pow(v1, 1.0 - r) / vr);
}

/// The integrated Harnack functional between equal-variance normals,
/// int (p_x/p_y)^{1/(p-1)} p_x = exp(p/(p-1)^2 * d^2/(2v)).
inline double harnack_functional(double d, double v, double p) {
    if (!(v > 0.0) || !(p > 1.0)) throw std::invalid_argument("gaussian: need v > 0 and p > 1");
    return std::exp(p / ((p - 1.0) * (p - 1.0)) * d * d / (2.0 * v));
}

}  // namespace hklab::gaussian
