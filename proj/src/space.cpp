#include "hklab/space.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace hklab {

FiniteMetricSpace::FiniteMetricSpace(Matrix dist, std::vector<std::vector<int>> neighbors,
                                     double tol, MetricCheck check)
    : n_(dist.rows()), dist_(std::move(dist)), neighbors_(std::move(neighbors)), tol_(tol) {
    if (dist_.rows() != dist_.cols()) throw std::invalid_argument("space: dist matrix not square");
    if (n_ <= 0) throw std::invalid_argument("space: empty point set");
    if (static_cast<int>(neighbors_.size()) != n_)
        throw std::invalid_argument("space: neighbor list size mismatch");
    validate(check);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) diameter_ = std::max(diameter_, dist_(i, j));
}

void FiniteMetricSpace::validate(MetricCheck check) {
    for (int i = 0; i < n_; ++i) {
        if (std::abs(dist_(i, i)) > tol_)
            throw std::invalid_argument("space: dist[i][i] != 0 at i=" + std::to_string(i));
        dist_(i, i) = 0.0;
        for (int j = i + 1; j < n_; ++j) {
            if (std::abs(dist_(i, j) - dist_(j, i)) > tol_)
                throw std::invalid_argument("space: dist not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            if (dist_(i, j) <= 0.0)
                throw std::invalid_argument("space: dist not positive at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
        }
    }

    auto check_triple = [&](int i, int j, int k) {
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + tol_)
            throw std::invalid_argument("space: triangle inequality violated at (" +
                                        std::to_string(i) + "," + std::to_string(j) + "," +
                                        std::to_string(k) + ")");
    };
    if (check == MetricCheck::Full && n_ <= 512) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) check_triple(i, j, k);
    } else if (check != MetricCheck::Trusted) {
        Rng rng(0x5eedULL + static_cast<uint64_t>(n_));
        const int samples = 200000;
        for (int s = 0; s < samples; ++s)
            check_triple(rng.uniform_int(n_), rng.uniform_int(n_), rng.uniform_int(n_));
    }

    // neighbor graph: symmetric closure assumed by callers; require connectivity
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : neighbors_[u]) {
            if (v < 0 || v >= n_) throw std::invalid_argument("space: neighbor index out of range");
            if (v == u) throw std::invalid_argument("space: self-loop in neighbor graph");
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    if (count != n_) throw std::invalid_argument("space: neighbor graph not connected");
}

void FiniteMetricSpace::set_coords(std::vector<Vec> c) {
    if (static_cast<int>(c.size()) != n_)
        throw std::invalid_argument("space: coords size mismatch");
    coords_ = std::move(c);
}

FiniteMetricSpace FiniteMetricSpace::scaled(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("space: scale must be positive");
    Matrix d = dist_;
    for (double& x : d.data()) x *= lambda;
    FiniteMetricSpace out(std::move(d), neighbors_, tol_ * std::max(1.0, lambda),
                          MetricCheck::Trusted);
    if (coords_) {
        auto c = *coords_;
        for (auto& p : c)
            for (double& x : p) x *= lambda;
        out.set_coords(std::move(c));
    }
    return out;
}

DiscreteMeasure::DiscreteMeasure(Vec weights, double tol) : w_(std::move(weights)) {
    for (size_t i = 0; i < w_.size(); ++i) {
        if (!(w_[i] >= -tol))
            throw std::invalid_argument("measure: negative weight at " + std::to_string(i));
        if (w_[i] < 0.0) w_[i] = 0.0;
    }
}

void DiscreteMeasure::require_probability(double tol) const {
    if (!is_probability(tol))
        throw std::invalid_argument("measure: weights do not sum to 1 (got " +
                                    std::to_string(total_mass()) + ")");
}

DiscreteMeasure DiscreteMeasure::dirac(int i, int n) {
    Vec w(n, 0.0);
    w[i] = 1.0;
    return DiscreteMeasure(std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform(int n) {
    return DiscreteMeasure(Vec(n, 1.0 / n));
}

double TestFunction::oscillation() const {
    double lo = kInf, hi = -kInf;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

bool TestFunction::satisfies_lipschitz(const FiniteMetricSpace& space, double tol) const {
    if (size() != space.size()) return false;
    for (int i = 0; i < space.size(); ++i)
        for (int j : space.neighbors()[i])
            if (std::abs(values[i] - values[j]) > lip_bound * space.dist(i, j) + tol) return false;
    return true;
}

void TestFunction::require_lipschitz(const FiniteMetricSpace& space, double tol) const {
    if (size() != space.size())
        throw std::invalid_argument("test function: size mismatch with space");
    if (!satisfies_lipschitz(space, tol))
        throw std::invalid_argument("test function: declared Lipschitz bound violated");
}

std::string to_string(FunctionTag tag) {
    switch (tag) {
        case FunctionTag::DistanceToPoint: return "distance-to-point";
        case FunctionTag::Coordinate: return "coordinate";
        case FunctionTag::RandomSmoothed: return "random-smoothed";
        case FunctionTag::UserSupplied: return "user-supplied";
    }
    return "?";
}

Vec discrete_gradient(const FiniteMetricSpace& space, const Vec& f) {
    if (static_cast<int>(f.size()) != space.size())
        throw std::invalid_argument("discrete_gradient: dimension mismatch");
    Vec g(space.size(), 0.0);
    for (int i = 0; i < space.size(); ++i) {
        double best = 0.0;
        for (int j : space.neighbors()[i])
            best = std::max(best, std::abs(f[i] - f[j]) / space.dist(i, j));
        g[i] = best;
    }
    return g;
}

Vec discrete_gradient(const FiniteMetricSpace& space, const TestFunction& f) {
    return discrete_gradient(space, f.values);
}

ChainRuleReport chain_rule_check(const FiniteMetricSpace& space, const Vec& f,
                                 const std::function<double(double)>& phi,
                                 const std::function<double(double)>& dphi, double tol) {
    Vec comp(f.size());
    for (size_t i = 0; i < f.size(); ++i) comp[i] = phi(f[i]);
    const Vec gf = discrete_gradient(space, f);
    const Vec gc = discrete_gradient(space, comp);
    ChainRuleReport rep;
    rep.tol = tol;
    rep.residuals.resize(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        rep.residuals[i] = std::abs(gc[i] - std::abs(dphi(f[i])) * gf[i]);
        rep.max_residual = std::max(rep.max_residual, rep.residuals[i]);
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

namespace {

// McShane regularization: the largest L-Lipschitz minorant of g w.r.t. the
// full metric, guaranteed to satisfy the TestFunction invariant.
Vec lipschitz_regularize(const FiniteMetricSpace& space, const Vec& g, double lip) {
    const int n = space.size();
    Vec f(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double m = kInf;
        for (int j = 0; j < n; ++j) m = std::min(m, g[j] + lip * space.dist(i, j));
        f[i] = m;
    }
    double mean = sum(f) / n;
    for (double& x : f) x -= mean;
    return f;
}

}  // namespace

LipschitzDictionary build_dictionary(const FiniteMetricSpace& space, const DictionaryConfig& cfg) {
    const int n = space.size();
    LipschitzDictionary dict;

    dict.add(TestFunction(Vec(n, 0.0), 0.0), FunctionTag::UserSupplied);  // the zero function

    std::vector<int> anchors;
    if (n <= cfg.max_distance_functions) {
        for (int k = 0; k < n; ++k) anchors.push_back(k);
    } else {
        for (int k = 0; k < cfg.max_distance_functions; ++k)
            anchors.push_back(static_cast<int>(static_cast<long long>(k) * (n - 1) /
                                               (cfg.max_distance_functions - 1)));
    }
    for (int k : anchors) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = space.dist(k, i);
        dict.add(TestFunction(std::move(v), 1.0), FunctionTag::DistanceToPoint);
    }

    const int ta = std::min<int>(cfg.truncated_anchors, static_cast<int>(anchors.size()));
    for (int a = 0; a < ta; ++a) {
        int k = anchors[static_cast<size_t>(a) * (anchors.size() - 1) / std::max(1, ta - 1)];
        for (double frac : cfg.truncation_fractions) {
            const double cap = frac * space.diameter();
            Vec v(n);
            for (int i = 0; i < n; ++i) v[i] = std::min(space.dist(k, i), cap);
            dict.add(TestFunction(std::move(v), 1.0), FunctionTag::DistanceToPoint);
        }
    }

    if (cfg.include_coordinates && space.coords()) {
        const auto& coords = *space.coords();
        const size_t dim = coords.empty() ? 0 : coords[0].size();
        for (size_t d = 0; d < dim; ++d) {
            Vec v(n);
            for (int i = 0; i < n; ++i) v[i] = coords[i][d];
            // Euclidean embeddings give |x_d - y_d| <= d(x,y); centered for tidiness
            double mean = sum(v) / n;
            for (double& x : v) x -= mean;
            dict.add(TestFunction(std::move(v), 1.0), FunctionTag::Coordinate);
        }
    }

    Rng rng(cfg.seed);
    for (int r = 0; r < cfg.random_functions; ++r) {
        Vec g(n);
        const double scale = 0.25 * space.diameter() * cfg.random_lip;
        for (int i = 0; i < n; ++i) g[i] = scale * rng.uniform(-1.0, 1.0);
        dict.add(TestFunction(lipschitz_regularize(space, g, cfg.random_lip), cfg.random_lip),
                 FunctionTag::RandomSmoothed);
    }

    for (const auto& f : dict.functions) f.require_lipschitz(space, 1e-9 * (1.0 + space.diameter()));
    return dict;
}

FiniteMetricSpace make_grid_space(int n, double h, double x0) {
    if (n < 2 || !(h > 0.0)) throw std::invalid_argument("grid: need n >= 2 and h > 0");
    Matrix d(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j) * h;
    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) nb[i].push_back(i - 1);
        if (i + 1 < n) nb[i].push_back(i + 1);
    }
    FiniteMetricSpace s(std::move(d), std::move(nb), 1e-12, MetricCheck::Trusted);
    std::vector<Vec> coords(n);
    for (int i = 0; i < n; ++i) coords[i] = {x0 + i * h};
    s.set_coords(std::move(coords));
    return s;
}

FiniteMetricSpace make_two_point_space(double d) {
    if (!(d > 0.0)) throw std::invalid_argument("two-point space: distance must be positive");
    Matrix m(2, 2, 0.0);
    m(0, 1) = m(1, 0) = d;
    return FiniteMetricSpace(std::move(m), {{1}, {0}}, 1e-12, MetricCheck::Trusted);
}

FiniteMetricSpace make_cycle_space(int n) {
    if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
    Matrix d(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int k = std::abs(i - j);
            d(i, j) = std::min(k, n - k);
        }
    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i < n; ++i) {
        nb[i].push_back((i + 1) % n);
        nb[i].push_back((i + n - 1) % n);
    }
    return FiniteMetricSpace(std::move(d), std::move(nb), 1e-12, MetricCheck::Trusted);
}

FiniteMetricSpace make_euclidean_space(const std::vector<Vec>& coords, double neighbor_radius) {
    const int n = static_cast<int>(coords.size());
    if (n < 2) throw std::invalid_argument("euclidean space: need at least 2 points");
    Matrix d(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t k = 0; k < coords[i].size(); ++k) {
                const double dx = coords[i][k] - coords[j][k];
                s += dx * dx;
            }
            d(i, j) = std::sqrt(s);
        }
    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (neighbor_radius <= 0.0 || d(i, j) <= neighbor_radius) nb[i].push_back(j);
        }
    // Euclidean distances satisfy the axioms by construction.
    FiniteMetricSpace s(std::move(d), std::move(nb), 1e-12, MetricCheck::Trusted);
    s.set_coords(coords);
    return s;
}

}  // namespace hklab
