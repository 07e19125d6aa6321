#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hklab {

using Vec = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense row-major matrix, the workhorse container for distance matrices,
/// kernels and couplings at desk scale (n up to a few thousand).
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }
    double* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }

    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    Vec data_;
};

/// y = M x
inline Vec matvec(const Matrix& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.cols())
        throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        double s = 0.0;
        for (int j = 0; j < m.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// y = x^T M (left action, used for measures)
inline Vec vecmat(const Vec& x, const Matrix& m) {
    if (static_cast<int>(x.size()) != m.rows())
        throw std::invalid_argument("vecmat: dimension mismatch");
    Vec y(m.cols(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* r = m.row(i);
        for (int j = 0; j < m.cols(); ++j) y[j] += xi * r[j];
    }
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* br = b.row(k);
            double* cr = c.row(i);
            for (int j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
        }
    return c;
}

inline double sum(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

inline double max_abs(const Vec& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

/// log(sum exp(v_i)) with the usual max shift; -inf for an empty/all -inf input.
inline double logsumexp(const Vec& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// Deterministic RNG used everywhere randomness is needed.  Normal draws are
/// hand-rolled (Box-Muller) so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) { reseed(seed); }

    void reseed(uint64_t seed) {
        // splitmix64 expansion of the seed into the state
        state_ = seed + 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < 4; ++i) next_u64();
        have_spare_ = false;
    }

    uint64_t next_u64() {
        // xorshift* variant; period 2^64-1, plenty for desk-scale experiments
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1) with 53 bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Independent child stream, used for per-path simulation streams.
    Rng child(uint64_t index) const {
        Rng r;
        r.state_ = state_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        r.next_u64();
        r.next_u64();
        r.have_spare_ = false;
        return r;
    }

private:
    uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Runs fn(i) for i in [0,n) on up to `threads` workers.  Results must be
/// written to pre-sized slots so reductions stay ordered and deterministic.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<int>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([=, &fn]() {
            for (int i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace hklab
