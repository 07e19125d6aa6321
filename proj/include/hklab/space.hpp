#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hklab/core.hpp"

namespace hklab {

/// How hard to validate metric axioms at construction.  Exhaustive triangle
/// checks are O(n^3); they are the default up to n = 512 and sampled above.
enum class MetricCheck { Full, Sampled, Trusted };

/// A finite metric measure substrate: point set with a full distance matrix
/// and a neighbor graph that defines the discrete gradient.
class FiniteMetricSpace {
public:
    FiniteMetricSpace(Matrix dist, std::vector<std::vector<int>> neighbors,
                      double tol = 1e-12, MetricCheck check = MetricCheck::Full);

    int size() const { return n_; }
    const Matrix& dist() const { return dist_; }
    double dist(int i, int j) const { return dist_(i, j); }
    const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }
    double diameter() const { return diameter_; }
    double tol() const { return tol_; }

    /// Coordinates are carried when the space was built from an embedding;
    /// they feed coordinate dictionary entries and grid detection.
    const std::optional<std::vector<Vec>>& coords() const { return coords_; }
    void set_coords(std::vector<Vec> c);

    /// Rescaled copy: every distance multiplied by lambda > 0.
    FiniteMetricSpace scaled(double lambda) const;

private:
    void validate(MetricCheck check);

    int n_ = 0;
    Matrix dist_;
    std::vector<std::vector<int>> neighbors_;
    double tol_ = 1e-12;
    double diameter_ = 0.0;
    std::optional<std::vector<Vec>> coords_;
};

/// Nonnegative weights over the points of a space.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(Vec weights, double tol = 1e-12);

    int size() const { return static_cast<int>(w_.size()); }
    const Vec& weights() const { return w_; }
    double operator[](int i) const { return w_[i]; }
    double total_mass() const { return sum(w_); }
    bool is_probability(double tol = 1e-12) const { return std::abs(total_mass() - 1.0) <= tol; }

    void require_probability(double tol = 1e-12) const;

    static DiscreteMeasure dirac(int i, int n);
    static DiscreteMeasure uniform(int n);

private:
    Vec w_;
};

/// A function on the points with a declared Lipschitz constant, checked
/// against the neighbor graph at construction.
struct TestFunction {
    Vec values;
    double lip_bound = 0.0;

    TestFunction() = default;
    TestFunction(Vec v, double lip) : values(std::move(v)), lip_bound(lip) {}

    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
    double oscillation() const;

    bool satisfies_lipschitz(const FiniteMetricSpace& space, double tol = 1e-12) const;
    void require_lipschitz(const FiniteMetricSpace& space, double tol = 1e-12) const;
};

enum class FunctionTag { DistanceToPoint, Coordinate, RandomSmoothed, UserSupplied };

std::string to_string(FunctionTag tag);

/// Finite dictionary standing in for the supremum over bounded Lipschitz
/// functions in the estimators and certificate searches.
struct LipschitzDictionary {
    std::vector<TestFunction> functions;
    std::vector<FunctionTag> tags;

    int size() const { return static_cast<int>(functions.size()); }
    const TestFunction& operator[](int i) const { return functions[i]; }

    void add(TestFunction f, FunctionTag tag) {
        functions.push_back(std::move(f));
        tags.push_back(tag);
    }
};

struct DictionaryConfig {
    int max_distance_functions = 64;   // d(x_k, .) anchors, evenly thinned above
    int truncated_anchors = 8;         // anchors that also get truncated variants
    std::vector<double> truncation_fractions = {0.25, 0.5, 0.75};  // of diameter
    int random_functions = 8;
    double random_lip = 1.0;
    uint64_t seed = 0;
    bool include_coordinates = true;
};

/// g[i] = max over neighbors j of |f(i)-f(j)| / d(i,j).
Vec discrete_gradient(const FiniteMetricSpace& space, const Vec& f);
Vec discrete_gradient(const FiniteMetricSpace& space, const TestFunction& f);

struct ChainRuleReport {
    Vec residuals;          // | |grad(phi o f)| - |phi'(f)|*|grad f| | per point
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Checks the chain rule for the discrete gradient against a differentiable
/// scalar map given by (phi, dphi).
ChainRuleReport chain_rule_check(const FiniteMetricSpace& space, const Vec& f,
                                 const std::function<double(double)>& phi,
                                 const std::function<double(double)>& dphi, double tol);

/// Deterministic dictionary: all (thinned) distance-to-point functions,
/// truncated variants d(x_k,.) ^ R, coordinates when available, and seeded
/// random functions regularized to the declared Lipschitz bound.  The zero
/// function is always first.
LipschitzDictionary build_dictionary(const FiniteMetricSpace& space, const DictionaryConfig& cfg);

// ---- constructors for the built-in spaces ----

/// Uniform 1-D lattice: n points x0, x0+h, ..., with nearest-neighbor graph.
FiniteMetricSpace make_grid_space(int n, double h, double x0);

/// Two points at the given distance.
FiniteMetricSpace make_two_point_space(double d);

/// n-cycle with unit edges and graph metric.
FiniteMetricSpace make_cycle_space(int n);

/// Euclidean point cloud; neighbors within radius r (or full graph if r <= 0).
FiniteMetricSpace make_euclidean_space(const std::vector<Vec>& coords, double neighbor_radius);

}  // namespace hklab
