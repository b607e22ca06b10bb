#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treepca/errors.hpp"
#include "treepca/frechet.hpp"
#include "treepca/geodesic.hpp"
#include "treepca/locus.hpp"
#include "treepca/newick.hpp"
#include "treepca/pca.hpp"
#include "treepca/refine.hpp"
#include "treepca/simulate.hpp"

namespace py = pybind11;
using namespace treepca;

namespace {

PhyloTree parse(const std::string& text, const std::string& root, std::shared_ptr<LeafSet> leaves) {
  NewickOptions o;
  o.root_label = root;
  o.leaves = std::move(leaves);
  return parse_newick(text, o);
}

py::dict projection_dict(const ProjectionResult& r) {
  py::dict d;
  d["tree"] = r.projected;
  d["weights"] = r.weights;
  d["distance"] = r.distance;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["tie_count"] = r.tie_count;
  return d;
}

py::dict stats_dict(const FitStatistics& s) {
  py::list rows;
  for (const auto& r : s.per_datum) rows.append(projection_dict(r));
  py::dict d;
  d["sum_sq_projected"] = s.sum_sq_projected;
  d["r_squared"] = s.r_squared;
  d["projections"] = rows;
  d["mean_of_projections"] = s.mean_of_projections;
  return d;
}

ProjectorConfig projector(const std::string& method, int resolution, int restarts, std::uint64_t seed, int threads) {
  ProjectorConfig c;
  c.method = parse_projector_method(method);
  c.resolution = resolution;
  c.geometric.restarts = restarts;
  c.seed = seed;
  c.threads = threads;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Principal components in phylogenetic tree space";

  auto base = py::register_exception<TreeSpaceError>(m, "TreeSpaceError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", base.ptr());

  py::class_<LeafSet, std::shared_ptr<LeafSet>>(m, "LeafSet")
      .def_property_readonly("labels", &LeafSet::labels)
      .def_property_readonly("n", &LeafSet::n)
      .def_static("numbered", [](int n) { return std::const_pointer_cast<LeafSet>(LeafSet::numbered(n)); });

  py::class_<PhyloTree>(m, "Tree")
      .def(py::init([](const std::string& newick, const std::string& root) { return parse(newick, root, nullptr); }),
           py::arg("newick"), py::arg("root") = "")
      .def_property_readonly("n", &PhyloTree::n)
      .def_property_readonly("leaves", [](const PhyloTree& t) { return std::const_pointer_cast<LeafSet>(t.leaves()); })
      .def_property_readonly("topology", [](const PhyloTree& t) { return t.topology().to_string(*t.leaves()); })
      .def("splits",
           [](const PhyloTree& t, bool internal_only) {
             std::vector<std::pair<std::vector<std::string>, double>> out;
             for (const auto& e : internal_only ? t.internal_edges() : t.edges()) {
               std::vector<std::string> side;
               for (int i : e.split.indices()) side.push_back(t.leaves()->label(i));
               out.emplace_back(side, e.length);
             }
             return out;
           },
           py::arg("internal_only") = true)
      .def("norm", [](const PhyloTree& t, const std::string& mode) { return norm(t, parse_pendant_mode(mode)); },
           py::arg("pendant") = "ignore")
      .def("equals", &PhyloTree::equals, py::arg("other"), py::arg("tolerance") = PhyloTree::kLengthTolerance)
      .def("newick", &write_newick)
      .def("__repr__", [](const PhyloTree& t) { return "Tree('" + write_newick(t) + "')"; });

  m.def("parse_newick", &parse, py::arg("text"), py::arg("root") = "", py::arg("leaves") = nullptr,
        "Parse one Newick string; `leaves` pins the leaf order of another tree.");
  m.def("read_trees",
        [](const std::string& path, const std::string& root) {
          NewickOptions o;
          o.root_label = root;
          return read_tree_file(path, o).trees;
        },
        py::arg("path"), py::arg("root") = "");
  m.def("write_trees", [](const std::string& path, const std::vector<PhyloTree>& trees) { write_tree_file(path, trees); });

  m.def("distance",
        [](const PhyloTree& x, const PhyloTree& y, const std::string& mode) { return distance(x, y, parse_pendant_mode(mode)); },
        py::arg("x"), py::arg("y"), py::arg("pendant") = "ignore");
  m.def("geodesic_point",
        [](const PhyloTree& x, const PhyloTree& y, double t) { return Geodesic(x, y, PendantMode::include).at(t); },
        py::arg("x"), py::arg("y"), py::arg("t"));

  m.def("frechet_mean",
        [](const std::vector<PhyloTree>& trees, std::vector<double> weights, const std::string& method, std::uint64_t seed,
           double eps) {
          const WeightedSample sample(trees, std::move(weights));
          MeanOptions o;
          o.eps = eps;
          MeanResult r = method == "sturm" ? sturm_mean(sample, seed, o) : cyclic_mean(sample, o);
          if (method == "refined") {
            const auto refined = refine_mean(sample, r.mean);
            r.mean = refined.mean;
            r.objective = refined.objective;
          } else if (method != "sturm" && method != "cyclic") {
            throw ParameterOutOfRange("unknown mean method '" + method + "'");
          }
          py::dict d;
          d["tree"] = r.mean;
          d["objective"] = r.objective;
          d["iterations"] = r.iterations;
          d["converged"] = r.converged;
          return d;
        },
        py::arg("trees"), py::arg("weights") = std::vector<double>{}, py::arg("method") = "cyclic", py::arg("seed") = 0,
        py::arg("eps") = 0.0);

  m.def("surface_point",
        [](const std::vector<PhyloTree>& vertices, const std::vector<double>& p, const std::string& method) {
          SurfaceOptions o;
          o.method = parse_mean_method(method);
          return surface_point(VertexSet(vertices), SimplexPoint(p), o);
        },
        py::arg("vertices"), py::arg("weights"), py::arg("method") = "cyclic");

  m.def("project",
        [](const PhyloTree& z, const std::vector<PhyloTree>& vertices, const std::string& method, int resolution, int restarts,
           std::uint64_t seed) {
          const VertexSet v(vertices);
          if (parse_projector_method(method) == ProjectorMethod::exhaustive) {
            LatticeOptions lo;
            lo.resolution = resolution;
            return projection_dict(exhaustive_project(z, v, lo));
          }
          GeometricOptions o;
          o.restarts = restarts;
          return projection_dict(geometric_project(z, v, seed, o));
        },
        py::arg("tree"), py::arg("vertices"), py::arg("method") = "geometric", py::arg("resolution") = 50, py::arg("restarts") = 3,
        py::arg("seed") = 0);

  m.def("sum_sq_projected",
        [](const std::vector<PhyloTree>& data, const std::vector<PhyloTree>& vertices, const std::string& method, int resolution,
           int restarts, std::uint64_t seed, int threads) {
          return stats_dict(sum_sq_projected(data, VertexSet(vertices), projector(method, resolution, restarts, seed, threads)));
        },
        py::arg("data"), py::arg("vertices"), py::arg("method") = "geometric", py::arg("resolution") = 50, py::arg("restarts") = 3,
        py::arg("seed") = 0, py::arg("threads") = 0);

  m.def("fit_component",
        [](const std::vector<PhyloTree>& data, int order, int restarts, std::uint64_t seed, int conv_window, double conv_threshold,
           int max_sweeps, int threads) {
          FitOptions o;
          o.order = order;
          o.restarts = restarts;
          o.seed = seed;
          o.conv_window = conv_window;
          o.conv_threshold = conv_threshold;
          o.max_sweeps = max_sweeps;
          o.threads = threads;
          FittedComponent fit = [&] {
            py::gil_scoped_release release;
            return fit_component(data, o);
          }();
          py::list trace;
          for (const auto& t : fit.trace) trace.append(py::make_tuple(t.sweep, t.sum_sq));
          py::dict d = stats_dict(fit.stats);
          d["order"] = fit.order;
          d["vertices"] = fit.vertices.vertices();
          d["trace"] = trace;
          d["restart_sum_sq"] = fit.restart_sum_sq;
          return d;
        },
        py::arg("data"), py::arg("order") = 2, py::arg("restarts") = 3, py::arg("seed") = 0, py::arg("conv_window") = 20,
        py::arg("conv_threshold") = 1e-3, py::arg("max_sweeps") = 500, py::arg("threads") = 0);

  m.def("kingman_tree", py::overload_cast<int, std::uint64_t>(&kingman_tree), py::arg("n_taxa"), py::arg("seed"));

  m.def("surface_dataset",
        [](int n_taxa, int n_points, const std::string& topo_op, const std::string& dispersion, std::uint64_t seed,
           int truth_resolution) {
          SurfaceDatasetSpec s;
          s.n_taxa = n_taxa;
          s.n_points = n_points;
          s.topo_op = parse_topology_move(topo_op);
          s.dispersion = parse_dispersion(dispersion);
          s.seed = seed;
          s.truth_resolution = truth_resolution;
          const auto ds = make_surface_dataset(s);
          py::dict d;
          d["vertices"] = ds.vertices.vertices();
          d["weights"] = ds.weights;
          d["data"] = ds.data;
          d["truth"] = stats_dict(ds.truth);
          return d;
        },
        py::arg("n_taxa") = 10, py::arg("n_points") = 100, py::arg("topo_op") = "nni", py::arg("dispersion") = "low",
        py::arg("seed") = 1, py::arg("truth_resolution") = 50);
}
