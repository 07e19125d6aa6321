// python bindings for the core operations

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hklab/divergence.hpp"
#include "hklab/dynamics.hpp"
#include "hklab/funcineq.hpp"
#include "hklab/gaussian.hpp"
#include "hklab/markov.hpp"
#include "hklab/space.hpp"
#include "hklab/transport.hpp"

namespace py = pybind11;
using namespace hklab;

namespace {

Matrix matrix_from_rows(const std::vector<Vec>& rows) {
    const int n = static_cast<int>(rows.size());
    const int m = n ? static_cast<int>(rows[0].size()) : 0;
    Matrix out(n, m);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != m)
            throw std::invalid_argument("matrix rows have unequal lengths");
        for (int j = 0; j < m; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

std::vector<Vec> matrix_to_rows(const Matrix& m) {
    std::vector<Vec> rows(m.rows(), Vec(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
}

py::dict harness_dict(const HarnessReport& rep) {
    py::dict d;
    d["id"] = rep.id;
    d["trials"] = rep.trials;
    d["skipped"] = rep.skipped;
    d["tol"] = rep.tol;
    d["max_violation"] = rep.max_violation;
    d["worst_case"] = rep.worst_case;
    d["pass"] = rep.pass;
    return d;
}

py::dict estimate_dict(const ConstantEstimate& est) {
    py::dict d;
    d["defined"] = est.defined;
    d["value"] = est.value;
    d["witness_point"] = est.witness_point;
    d["witness_function"] = est.witness_function;
    d["excluded"] = est.excluded;
    d["convergence"] = est.convergence;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hklab, m) {
    m.doc() = "transportation distances and functional inequalities on finite spaces";

    py::class_<FiniteMetricSpace>(m, "FiniteMetricSpace")
        .def(py::init([](const std::vector<Vec>& dist,
                         const std::vector<std::vector<int>>& neighbors, double tol) {
                 return FiniteMetricSpace(matrix_from_rows(dist), neighbors, tol);
             }),
             py::arg("dist"), py::arg("neighbors"), py::arg("tol") = 1e-12)
        .def_property_readonly("size", &FiniteMetricSpace::size)
        .def_property_readonly("diameter", &FiniteMetricSpace::diameter)
        .def("dist", py::overload_cast<int, int>(&FiniteMetricSpace::dist, py::const_))
        .def_property_readonly("neighbors", &FiniteMetricSpace::neighbors)
        .def_property_readonly("coords", [](const FiniteMetricSpace& s) {
            return s.coords() ? py::cast(*s.coords()) : py::none().cast<py::object>();
        });

    m.def("grid_space", &make_grid_space, py::arg("n"), py::arg("h"), py::arg("x0"));
    m.def("two_point_space", &make_two_point_space, py::arg("d"));
    m.def("cycle_space", &make_cycle_space, py::arg("n"));
    m.def("euclidean_space", &make_euclidean_space, py::arg("coords"),
          py::arg("neighbor_radius") = 0.0);

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init<Vec, double>(), py::arg("weights"), py::arg("tol") = 1e-12)
        .def_property_readonly("weights", &DiscreteMeasure::weights)
        .def_property_readonly("total_mass", &DiscreteMeasure::total_mass)
        .def("is_probability", &DiscreteMeasure::is_probability, py::arg("tol") = 1e-12)
        .def_static("dirac", &DiscreteMeasure::dirac)
        .def_static("uniform", &DiscreteMeasure::uniform);

    py::class_<TestFunction>(m, "TestFunction")
        .def(py::init<Vec, double>(), py::arg("values"), py::arg("lip_bound"))
        .def_readonly("values", &TestFunction::values)
        .def_readonly("lip_bound", &TestFunction::lip_bound);

    py::class_<LipschitzDictionary>(m, "LipschitzDictionary")
        .def_property_readonly("size", &LipschitzDictionary::size)
        .def("function", [](const LipschitzDictionary& d, int i) { return d[i]; });

    m.def(
        "build_dictionary",
        [](const FiniteMetricSpace& space, int max_distance, int randoms, uint64_t seed) {
            DictionaryConfig cfg;
            cfg.max_distance_functions = max_distance;
            cfg.random_functions = randoms;
            cfg.seed = seed;
            return build_dictionary(space, cfg);
        },
        py::arg("space"), py::arg("max_distance_functions") = 64,
        py::arg("random_functions") = 8, py::arg("seed") = 0);

    m.def("discrete_gradient",
          py::overload_cast<const FiniteMetricSpace&, const Vec&>(&discrete_gradient));

    py::class_<MarkovKernel>(m, "MarkovKernel")
        .def(py::init([](const std::vector<Vec>& rows, double tol) {
                 return MarkovKernel(matrix_from_rows(rows), tol);
             }),
             py::arg("rows"), py::arg("tol") = 1e-10)
        .def_property_readonly("size", &MarkovKernel::size)
        .def("rows", [](const MarkovKernel& k) { return matrix_to_rows(k.matrix()); })
        .def("row_measure", &MarkovKernel::row_measure);

    m.def("apply_to_function", &apply_to_function);
    m.def("apply_to_measure", &apply_to_measure);
    m.def("heat_kernel_grid",
          py::overload_cast<const FiniteMetricSpace&, double>(&heat_kernel_grid));
    m.def("ou_kernel_grid",
          py::overload_cast<const FiniteMetricSpace&, double, double>(&ou_kernel_grid));

    m.def("hellinger_sq", &hellinger_sq);
    m.def("wasserstein2_sq", &wasserstein2_sq);
    m.def("let_solve", [](const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                          const FiniteMetricSpace& space) {
        LETSolution sol = let_solve(mu0, mu1, space);
        py::dict d;
        d["value"] = sol.value;
        d["coupling"] = matrix_to_rows(sol.coupling);
        d["gap"] = sol.gap;
        d["iterations"] = sol.iterations;
        d["epsilon_schedule"] = sol.epsilon_schedule;
        d["converged"] = sol.converged;
        return d;
    });
    m.def(
        "w_ab",
        [](double a, double b, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
           const FiniteMetricSpace& space) { return w_ab(WParams(a, b), mu0, mu1, space); },
        py::arg("a"), py::arg("b"), py::arg("mu0"), py::arg("mu1"), py::arg("space"));
    m.def("w_ab_dirac",
          [](double a, double b, double d) { return w_ab_dirac(WParams(a, b), d); });

    m.def("c_b", [](double b) {
        DivParams p = c_b(b);
        return py::make_tuple(p.p, p.q, p.c_b);
    });
    m.def("young_gap", &young_gap);
    m.def("gronwall_flow", &gronwall_flow);
    m.def("renyi_T0b", [](double b, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
        RenyiResult r = renyi_T0b(DivParams(0.0, b), mu0, mu1);
        py::dict d;
        d["value"] = r.value;
        d["t_tilde"] = r.t_tilde;
        d["order_q"] = r.order_q;
        d["density"] = r.density;
        d["absolutely_continuous"] = r.absolutely_continuous;
        return d;
    });
    m.def("t_point_mass_bounds", [](double a, double b, double d) {
        auto bounds = t_point_mass_bounds(DivParams(a, b), d);
        return py::make_tuple(bounds.lower, bounds.upper);
    });
    m.def("t_ab_bounds", [](double a, double b, const DiscreteMeasure& mu0,
                            const DiscreteMeasure& mu1, const FiniteMetricSpace& space,
                            const LipschitzDictionary& dict) {
        auto cv = t_ab_bounds(DivParams(a, b), mu0, mu1, space, dict);
        py::dict d;
        d["lower"] = cv.lower;
        d["upper"] = cv.upper;
        d["lower_certificate"] =
            py::dict(py::arg("f_index") = cv.lower_certificate.f_index,
                     py::arg("k") = cv.lower_certificate.k,
                     py::arg("family") = cv.lower_certificate.linear_family ? "explin"
                                                                            : "expquad",
                     py::arg("beta0_rule") = cv.lower_certificate.beta0_rule);
        d["upper_certificate"] = cv.upper_certificate;
        d["upper_capped"] = cv.upper_capped;
        return d;
    });

    m.def("rpi_constant", [](const MarkovKernel& p, const FiniteMetricSpace& s,
                             const LipschitzDictionary& d) {
        return estimate_dict(rpi_constant(p, s, d));
    });
    m.def("rlsi_constant", [](const MarkovKernel& p, const FiniteMetricSpace& s,
                              const LipschitzDictionary& d) {
        return estimate_dict(rlsi_constant(p, s, d));
    });
    m.def("gradient_bound_constant", [](const MarkovKernel& p, const FiniteMetricSpace& s,
                                        const LipschitzDictionary& d) {
        return estimate_dict(gradient_bound_constant(p, s, d));
    });
    m.def("increment_lemma_check",
          [](const MarkovKernel& p, const FiniteMetricSpace& s, const LipschitzDictionary& d,
             int trials, uint64_t seed, double tol) {
              return harness_dict(increment_lemma_check(p, s, d, trials, seed, tol));
          },
          py::arg("kernel"), py::arg("space"), py::arg("dictionary"), py::arg("trials") = 1000,
          py::arg("seed") = 0, py::arg("tol") = 1e-10);

    auto gsub = m.def_submodule("gaussian", "closed forms for 1-D normals");
    gsub.def("hellinger_sq", &gaussian::hellinger_sq);
    gsub.def("wasserstein2_sq", &gaussian::wasserstein2_sq);
    gsub.def("renyi_divergence", &gaussian::renyi_divergence);

    m.def(
        "gaussian_quasi_invariance",
        [](double t, double d, const Vec& kappas, const Vec& ps, double h) {
            auto rep = gaussian_quasi_invariance(t, d, kappas, ps, h);
            py::list checks;
            for (const auto& c : rep.checks) {
                py::dict e;
                e["name"] = c.name;
                e["lhs"] = c.lhs;
                e["rhs"] = c.rhs;
                e["pass"] = c.pass;
                checks.append(e);
            }
            py::dict out;
            out["checks"] = checks;
            out["hellinger_vacuous"] = rep.hellinger_vacuous;
            out["subdivision_steps"] = rep.subdivision_steps;
            out["subdivision_he2"] = rep.subdivision_he2;
            out["pass"] = rep.pass;
            return out;
        },
        py::arg("t"), py::arg("d"), py::arg("kappas"), py::arg("ps"), py::arg("h") = 0.01);

    m.attr("__version__") = "0.1.0";
}
