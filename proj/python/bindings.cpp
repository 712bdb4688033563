#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subcluster/approx_k.hpp"
#include "subcluster/chebyshev.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/exact_ref.hpp"
#include "subcluster/generator.hpp"
#include "subcluster/misclassification.hpp"
#include "subcluster/preprocess.hpp"

namespace py = pybind11;
using namespace subcluster;

namespace {

py::dict validation_dict(const PolyValidation& v) {
  py::dict d;
  d["max_abs_low"] = v.max_abs_low;
  d["bound_low"] = v.bound_low;
  d["max_dev_flat"] = v.max_dev_flat;
  d["bound_flat"] = v.bound_flat;
  d["max_rel_disagreement"] = v.max_rel_disagreement;
  d["p_at_one"] = v.p_at_one;
  d["log10_max_coeff"] = v.log10_max_coeff;
  d["low_ok"] = v.low_ok();
  d["flat_ok"] = v.flat_ok();
  return d;
}

py::dict diag_dict(const PreprocessDiagnostics& g) {
  py::dict d;
  d["sample_size"] = g.sample_size;
  d["directed_edges"] = g.directed_edges;
  d["mutual_edges"] = g.mutual_edges;
  d["components"] = g.components;
  d["candidates"] = g.candidates;
  d["representatives"] = g.representatives;
  d["aborted_queries"] = g.aborted_queries;
  d["singleton_hits"] = g.singleton_hits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_subcluster, m) {
  m.doc() = "Sublinear-time spectral clustering oracle";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception<PreprocessingFailure>(m, "PreprocessingFailure", PyExc_RuntimeError);
  py::register_exception<WrongGraphError>(m, "WrongGraphError", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init<std::size_t, int, const std::vector<std::vector<Vertex>>&>(), py::arg("n"), py::arg("d"),
           py::arg("adjacency"))
      .def_property_readonly("n", &Graph::n)
      .def_property_readonly("d", &Graph::d)
      .def("degree", &Graph::degree)
      .def("neighbor", &Graph::neighbor)
      .def("neighbors", [](const Graph& g, Vertex x) {
        auto s = g.neighbors(x);
        return std::vector<Vertex>(s.begin(), s.end());
      })
      .def("digest", &Graph::digest)
      .def("edge_count", &Graph::edge_count)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; });

  m.def("load_graph", &load_graph);
  m.def("save_graph", &save_graph);
  m.def("outer_conductance", [](const Graph& g, const std::vector<Vertex>& S) { return outer_conductance(g, S); });

  m.def(
      "generate_clusterable",
      [](std::size_t n, int k, int d, double cross, std::uint64_t seed, int reserved_slots) {
        GeneratorConfig c{n, k, d, cross, seed, reserved_slots};
        auto inst = generate_clusterable(c);
        return py::make_tuple(inst.graph, inst.truth.labels);
      },
      py::arg("n"), py::arg("k"), py::arg("d") = 3, py::arg("cross") = 0.0, py::arg("seed") = 1,
      py::arg("reserved_slots") = 1, "Returns (graph, labels).");
  m.def(
      "disjoint_cliques",
      [](int k, std::size_t size, int d) {
        auto inst = disjoint_cliques(k, size, d);
        return py::make_tuple(inst.graph, inst.truth.labels);
      },
      py::arg("k"), py::arg("size"), py::arg("d") = -1);

  py::class_<WalkPolynomial>(m, "WalkPolynomial")
      .def_readonly("t_min", &WalkPolynomial::t_min)
      .def_readonly("t_delta", &WalkPolynomial::t_delta)
      .def_readonly("coeffs", &WalkPolynomial::coeffs)
      .def_readonly("warnings", &WalkPolynomial::warnings)
      .def("eval", &WalkPolynomial::eval)
      .def("eval_clenshaw", &WalkPolynomial::eval_clenshaw)
      .def("coefficient", &WalkPolynomial::coefficient)
      .def_property_readonly("validation", [](const WalkPolynomial& w) { return validation_dict(w.validation); });

  m.def(
      "walk_polynomial",
      [](std::size_t n, double phi, double eps, std::optional<int> t_min, std::optional<int> degree, bool strict) {
        PolyParams p{n, phi, eps, t_min, degree};
        PolyBuildOptions o;
        o.strict = strict;
        return build_walk_polynomial(p, o);
      },
      py::arg("n"), py::arg("phi"), py::arg("eps"), py::arg("t_min") = py::none(), py::arg("degree") = py::none(),
      py::arg("strict") = false);
  m.def("cheb_coefficient", &cheb_coefficient, py::arg("v"), py::arg("eps"), py::arg("t"), py::arg("tol") = 1e-30);

  py::class_<OracleArtifact>(m, "Oracle")
      .def_property_readonly("representatives", &OracleArtifact::representatives)
      .def_property_readonly("diagnostics", [](const OracleArtifact& a) { return diag_dict(a.diag); })
      .def_readonly("r_stored", &OracleArtifact::r_stored)
      .def_readonly("r_query", &OracleArtifact::r_query)
      .def("query", [](const OracleArtifact& a, const Graph& g, Vertex x) { return query(g, a, x); })
      .def("query_many", [](const OracleArtifact& a, const Graph& g, const std::vector<Vertex>& xs,
                            int threads) { return query_many(g, a, xs, threads); },
           py::arg("graph"), py::arg("vertices"), py::arg("threads") = 1)
      .def("save", [](const OracleArtifact& a, const std::string& path) { save_artifact(a, path); })
      .def("to_bytes", [](const OracleArtifact& a) { return py::bytes(serialize_artifact(a)); });
  m.def("load_oracle", &load_artifact);
  m.def("oracle_from_bytes", [](const py::bytes& b) { return deserialize_artifact(std::string(b)); });

  m.def(
      "preprocess",
      [](const Graph& g, std::size_t k_hat, double phi, double eps, std::uint64_t seed, double walks_scale,
         double delta_exp, int votes, std::optional<std::size_t> max_leaves, std::optional<int> t_min,
         std::optional<int> degree, int threads) {
        PreprocessConfig c;
        c.k_hat = k_hat;
        c.phi = phi;
        c.eps = eps;
        c.seed = seed;
        c.walks_scale = walks_scale;
        c.delta_exp = delta_exp;
        c.votes = votes;
        c.max_leaves = max_leaves;
        c.t_min = t_min;
        c.degree = degree;
        c.threads = threads;
        py::gil_scoped_release release;
        return preprocess(g, c);
      },
      py::arg("graph"), py::arg("k_hat"), py::arg("phi"), py::arg("eps"), py::arg("seed") = 1,
      py::arg("walks_scale") = 8.0, py::arg("delta_exp") = 0.5, py::arg("votes") = 25,
      py::arg("max_leaves") = py::none(), py::arg("t_min") = py::none(), py::arg("degree") = py::none(),
      py::arg("threads") = 1);

  m.def(
      "approx_k",
      [](const Graph& g, double precision, double phi, double eps, std::size_t k_hat, std::uint64_t seed,
         std::optional<std::size_t> samples, std::optional<std::uint64_t> boost, std::optional<int> t_min,
         std::optional<int> degree) {
        ApproxKConfig c;
        c.eps_apx = precision;
        c.phi = phi;
        c.eps = eps;
        c.k_hat = k_hat;
        c.seed = seed;
        c.samples = samples;
        c.boost = boost;
        c.t_min = t_min;
        c.degree = degree;
        ApproxKResult r;
        {
          py::gil_scoped_release release;
          r = approx_k(g, c);
        }
        py::dict d;
        d["k_over_n"] = r.k_over_n;
        d["k"] = r.k;
        d["samples"] = r.samples;
        d["boost"] = r.boost;
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("graph"), py::arg("precision"), py::arg("phi"), py::arg("eps"), py::arg("k_hat") = 1,
      py::arg("seed") = 1, py::arg("samples") = py::none(), py::arg("boost") = py::none(),
      py::arg("t_min") = py::none(), py::arg("degree") = py::none());

  m.def(
      "misclassification",
      [](const std::vector<int>& truth, int k, const std::vector<int>& predicted) {
        const auto r = misclassification(Clustering(truth, k), predicted);
        return py::make_tuple(r.errors, r.rate, r.unclassified);
      },
      py::arg("truth"), py::arg("k"), py::arg("predicted"), "Returns (errors, rate, unclassified).");

  m.def(
      "spectral_embedding",
      [](const Graph& g, const std::vector<int>& labels, int k) {
        const auto ref = build_reference(g, Clustering(labels, k));
        return py::make_tuple(ref.eigenvalues, ref.U);
      },
      py::arg("graph"), py::arg("labels"), py::arg("k"), "Returns (laplacian eigenvalues, U_k) densely.");
}
