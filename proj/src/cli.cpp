#include "treepca/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "treepca/errors.hpp"
#include "treepca/format.hpp"
#include "treepca/frechet.hpp"
#include "treepca/geodesic.hpp"
#include "treepca/locus.hpp"
#include "treepca/newick.hpp"
#include "treepca/parallel.hpp"
#include "treepca/pca.hpp"
#include "treepca/plot.hpp"
#include "treepca/refine.hpp"
#include "treepca/simulate.hpp"

#ifndef TREEPCA_VERSION
#define TREEPCA_VERSION "dev"
#endif

namespace treepca {

std::string version_string() { return TREEPCA_VERSION; }

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string pendant = "ignore";
  std::string out_dir = ".";
  std::string root_label;
  bool json_output = false;

  PendantMode mode() const { return parse_pendant_mode(pendant); }
  int resolved_threads() const { return threads > 0 ? threads : default_thread_count(); }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (0: TSP_THREADS or all cores)")->capture_default_str();
  app->add_option("--pendant", c.pendant, "Pendant edges in distances: ignore or include")
      ->check(CLI::IsMember({"ignore", "include"}))
      ->capture_default_str();
  app->add_option("--out", c.out_dir, "Output directory (created if missing)")->capture_default_str();
  app->add_option("--root", c.root_label, "Label of the root leaf when reading Newick");
  app->add_flag("--json", c.json_output, "Print a JSON summary instead of text");
}

double rounded(double v) { return round_significant(v); }

json weights_json(const std::vector<double>& w) {
  json out = json::array();
  for (double x : w) out.push_back(rounded(x));
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

NewickOptions newick_options(const Common& c, LeafSetPtr leaves = nullptr) {
  NewickOptions o;
  o.leaves = std::move(leaves);
  if (!o.leaves) o.root_label = c.root_label;
  return o;
}

TreeFile read_trees(const std::string& path, const Common& c, LeafSetPtr leaves = nullptr) {
  auto file = read_tree_file(path, newick_options(c, std::move(leaves)));
  if (file.trees.empty()) throw EmptyData(path + ": no trees");
  return file;
}

std::vector<double> read_weights(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<double> out;
  std::string line;
  int number = 0;
  bool data_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    std::istringstream parse(field);
    parse.imbue(std::locale::classic());
    double w = 0.0;
    if (!(parse >> w)) {
      if (!data_seen) {
        data_seen = true;  // header row
        continue;
      }
      throw DataError(path + ":" + std::to_string(number) + ": not a number: " + field);
    }
    data_seen = true;
    out.push_back(w);
  }
  return out;
}

std::string split_label(Split s, const LeafSet& leaves) { return TopologyId({s}).to_string(leaves); }

json support_json(const GeodesicSupport& support, const LeafSet& leaves) {
  auto edges = [&](const std::vector<Edge>& list) {
    json out = json::array();
    for (const auto& e : list) out.push_back({{"split", split_label(e.split, leaves)}, {"length", rounded(e.length)}});
    return out;
  };
  json legs = json::array();
  for (const auto& leg : support.legs) legs.push_back({{"a", edges(leg.a)}, {"b", edges(leg.b)}, {"ratio", rounded(leg.ratio())}});
  json common = json::array();
  for (const auto& c : support.common)
    common.push_back({{"split", split_label(c.split, leaves)}, {"source", rounded(c.source_length)}, {"target", rounded(c.target_length)}});
  return {{"legs", legs}, {"common", common}};
}

std::string projections_csv(const std::vector<ProjectionResult>& rows, std::size_t vertex_count, const LeafSet& leaves) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vertex_count; ++i) out << "p" << i << ",";
  out << "distance,topology,tie_count\n";
  for (const auto& r : rows) {
    for (double w : r.weights) out << format_number(w) << ",";
    out << format_number(r.distance) << "," << r.projected.topology().to_string(leaves) << "," << r.tie_count << "\n";
  }
  return out.str();
}

// Resolved settings of a run, written as run.json next to the outputs.
json run_record(const CLI::App* command, const Common& c) {
  json options = json::object();
  for (const CLI::Option* opt : command->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_min() == 0) {
      options[name] = opt->count() > 0;
      continue;
    }
    const auto& results = opt->results();
    if (!results.empty()) {
      options[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      options[name] = opt->get_default_str();
    }
  }
  json record;
  record["software"] = "treepca";
  record["version"] = version_string();
  record["subcommand"] = command->get_parent() && command->get_parent()->get_parent()
                             ? command->get_parent()->get_name() + " " + command->get_name()
                             : command->get_name();
  record["seed"] = c.seed;
  record["threads"] = c.resolved_threads();
  record["pendant"] = c.pendant;
  record["options"] = options;
  return record;
}

fs::path output_dir(const Common& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

struct GeodesicArgs {
  std::string source, target;
  double t = -1.0;
  bool support = false;
};

json run_geodesic(const GeodesicArgs& a, const Common& c, std::ostream& out) {
  const auto first = read_trees(a.source, c);
  const auto second = read_trees(a.target, c, first.leaves);
  const PhyloTree& x = first.trees.front();
  const PhyloTree& y = second.trees.front();
  const Geodesic g(x, y, c.mode());
  json result;
  result["distance"] = rounded(g.length());
  std::string tree;
  if (a.t >= 0.0) {
    tree = write_newick(Geodesic(x, y, PendantMode::include).at(a.t));
    result["t"] = rounded(a.t);
    result["tree"] = tree;
  }
  if (a.support) result["support"] = support_json(g.support(), *first.leaves);
  if (!c.json_output) {
    if (!tree.empty()) out << tree << "\n";
    json brief{{"distance", result["distance"]}};
    if (a.support) brief["support"] = result["support"];
    out << brief.dump() << "\n";
  }
  return result;
}

struct MeanArgs {
  std::string input, weights;
  std::string method = "cyclic";
  double eps = 0.0;
  int window = 10;
  long max_iter = 100000;
};

json run_mean(const MeanArgs& a, const Common& c, std::ostream& out) {
  const auto file = read_trees(a.input, c);
  std::vector<double> w;
  if (!a.weights.empty()) {
    w = read_weights(a.weights);
    if (w.size() != file.trees.size())
      throw DataError(a.weights + ": " + std::to_string(w.size()) + " weights for " + std::to_string(file.trees.size()) + " trees");
  }
  const WeightedSample sample(file.trees, w);
  MeanOptions o;
  o.eps = a.eps;
  o.window = a.window;
  o.max_iter = a.max_iter;
  o.pendant = c.mode();
  MeanResult r;
  bool certified = false;
  if (a.method == "sturm") {
    r = sturm_mean(sample, c.seed, o);
  } else {
    r = cyclic_mean(sample, o);
    if (a.method == "refined") {
      RefineOptions ro;
      ro.pendant = c.mode();
      const auto refined = refine_mean(sample, r.mean, ro);
      r.mean = refined.mean;
      r.objective = refined.objective;
      certified = refined.certified;
    }
  }
  const auto dir = output_dir(c);
  const std::string tree = write_newick(r.mean);
  json result{{"method", a.method},
              {"objective", rounded(r.objective)},
              {"iterations", r.iterations},
              {"converged", r.converged}};
  if (a.method == "refined") result["certified"] = certified;
  write_text(dir / "mean.nwk", tree + "\n");
  write_json(dir / "mean.json", result);
  result["tree"] = tree;
  if (!c.json_output) {
    out << tree << "\n";
    json brief = result;
    brief.erase("tree");
    out << brief.dump() << "\n";
  }
  return result;
}

struct ProjectArgs {
  std::string vertices, input;
  std::string method = "geometric";
  int resolution = 50;
  int restarts = 3;
  double eps = 0.0;
  int window = 10;
};

ProjectorConfig projector(const std::string& method, int resolution, int restarts, double eps, int window, const Common& c) {
  ProjectorConfig p;
  p.method = parse_projector_method(method);
  p.resolution = resolution;
  p.geometric.restarts = restarts;
  p.geometric.eps = eps;
  p.geometric.window = window;
  p.geometric.pendant = c.mode();
  p.seed = c.seed;
  p.threads = c.threads;
  return p;
}

json run_project(const ProjectArgs& a, const Common& c, std::ostream& out) {
  const auto vfile = read_trees(a.vertices, c);
  const auto data = read_trees(a.input, c, vfile.leaves);
  const VertexSet vertices(vfile.trees);
  const auto config = projector(a.method, a.resolution, a.restarts, a.eps, a.window, c);
  const auto stats = fit_statistics(data.trees, project_all(data.trees, vertices, config), c.mode());
  const std::string csv = projections_csv(stats.per_datum, vertices.size(), *vfile.leaves);
  const auto dir = output_dir(c);
  write_text(dir / "projections.csv", csv);
  json result{{"method", a.method},
              {"order", vertices.order()},
              {"data", data.trees.size()},
              {"sum_sq_projected", rounded(stats.sum_sq_projected)},
              {"r_squared", rounded(stats.r_squared)},
              {"projections", (dir / "projections.csv").string()}};
  if (!c.json_output) out << csv;
  return result;
}

struct PcaArgs {
  std::string input, kernels;
  int order = 2;
  int restarts = 3;
  int conv_window = 20;
  double conv_threshold = 1e-3;
  int max_sweeps = 500;
  double search_eps = 0.0;
  std::string report_method = "geometric";
  int resolution = 50;
};

ProposalKernel kernel_from_json(const json& k, double scale) {
  const std::string kind = k.at("kind").get<std::string>();
  if (kind == "data_resample") return ProposalKernel::data_resample();
  if (kind == "beta_blend") return ProposalKernel::beta_blend(k.value("alpha", 2.0), k.value("beta", 2.0));
  if (kind == "random_walk") {
    const double step = k.contains("step_fraction") ? k.at("step_fraction").get<double>() * scale : k.value("step_size", 0.05 * scale);
    return ProposalKernel::random_walk(k.value("steps", 1), step);
  }
  throw ParameterOutOfRange("unknown kernel kind '" + kind + "'");
}

json stats_json(const FittedComponent& fit, const std::vector<PhyloTree>& data) {
  json restarts = json::array();
  for (double d : fit.restart_sum_sq) restarts.push_back(rounded(d));
  return {{"order", fit.order},
          {"data", data.size()},
          {"sum_sq_projected", rounded(fit.stats.sum_sq_projected)},
          {"r_squared", rounded(fit.stats.r_squared)},
          {"best_restart", fit.best_restart},
          {"restart_sum_sq", restarts},
          {"sweeps", fit.trace.empty() ? 0 : fit.trace.back().sweep},
          {"seed", fit.seed},
          {"mean_of_projections", write_newick(fit.stats.mean_of_projections)}};
}

json run_pca(const PcaArgs& a, const Common& c, std::ostream& out) {
  const auto file = read_trees(a.input, c);
  FitOptions o;
  o.order = a.order;
  o.restarts = a.restarts;
  o.conv_window = a.conv_window;
  o.conv_threshold = a.conv_threshold;
  o.max_sweeps = a.max_sweeps;
  o.seed = c.seed;
  o.pendant = c.mode();
  o.threads = c.threads;
  o.search.geometric.eps = a.search_eps;
  o.report.method = parse_projector_method(a.report_method);
  o.report.resolution = a.resolution;
  if (!a.kernels.empty()) {
    const json config = read_json(a.kernels);
    const double scale = data_scale(file.trees, c.mode());
    const json& list = config.is_array() ? config : config.at("kernels");
    for (const auto& k : list) o.kernels.push_back(kernel_from_json(k, scale));
  }
  const auto fit = fit_component(file.trees, o);

  const auto dir = output_dir(c);
  write_tree_file(dir / "vertices.nwk", fit.vertices.vertices());
  write_text(dir / "projections.csv", projections_csv(fit.stats.per_datum, fit.vertices.size(), *file.leaves));
  std::ostringstream trace;
  trace << "sweep,sum_sq\n";
  for (const auto& t : fit.trace) trace << t.sweep << "," << format_number(t.sum_sq) << "\n";
  write_text(dir / "trace.csv", trace.str());
  const json stats = stats_json(fit, file.trees);
  write_json(dir / "stats.json", stats);
  if (!c.json_output) {
    out << "D^2 " << format_number(fit.stats.sum_sq_projected) << "  r^2 " << format_number(fit.stats.r_squared) << "  sweeps "
        << stats["sweeps"] << "\n";
    for (const auto& v : fit.vertices.vertices()) out << write_newick(v) << "\n";
  }
  return stats;
}

struct CoalescentArgs {
  int taxa = 6;
  int count = 10;
};

json run_coalescent(const CoalescentArgs& a, const Common& c, std::ostream& out) {
  std::mt19937_64 rng(c.seed);
  std::vector<PhyloTree> trees;
  for (int i = 0; i < a.count; ++i) trees.push_back(kingman_tree(a.taxa, rng));
  const auto dir = output_dir(c);
  write_tree_file(dir / "trees.nwk", trees);
  json truth{{"mode", "coalescent"}, {"taxa", a.taxa}, {"count", a.count}, {"seed", c.seed}};
  write_json(dir / "truth.json", truth);
  if (!c.json_output) out << "wrote " << a.count << " trees to " << (dir / "trees.nwk").string() << "\n";
  return truth;
}

struct QuadrupleArgs {
  int taxa = 6;
  int count = 10;
  double theta = 1.0;
};

json run_quadruple(const QuadrupleArgs& a, const Common& c, std::ostream& out) {
  const auto dir = output_dir(c);
  std::ostringstream text;
  json records = json::array();
  for (int i = 0; i < a.count; ++i) {
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(i));
    const auto q = make_quadruple(a.taxa, seed, a.theta);
    text << "# quadruple " << i << ": species, v0, v1, v2, test\n";
    text << write_newick(q.species) << "\n";
    for (const auto& v : q.vertices) text << write_newick(v) << "\n";
    text << write_newick(q.test) << "\n";
    records.push_back({{"index", i}, {"seed", seed}, {"test_internal_length", rounded(total_internal_length(q.test))}});
  }
  write_text(dir / "quadruples.nwk", text.str());
  json truth{{"mode", "quadruple"}, {"taxa", a.taxa}, {"count", a.count}, {"theta", rounded(a.theta)},
             {"layout", {"species", "v0", "v1", "v2", "test"}}, {"quadruples", records}};
  write_json(dir / "truth.json", truth);
  if (!c.json_output) out << "wrote " << a.count << " quadruples to " << (dir / "quadruples.nwk").string() << "\n";
  return truth;
}

struct SurfaceArgs {
  std::string spec;
};

SurfaceDatasetSpec surface_spec(const json& j, const Common& c) {
  SurfaceDatasetSpec s;
  s.n_taxa = j.value("n_taxa", s.n_taxa);
  s.n_points = j.value("n_points", s.n_points);
  s.topo_op = parse_topology_move(j.value("topo_op", to_string(s.topo_op)));
  s.op_count = j.value("op_count", s.op_count);
  s.gamma_shape = j.value("gamma_shape", s.gamma_shape);
  s.gamma_rate = j.value("gamma_rate", s.gamma_rate);
  s.dirichlet_alpha = j.value("dirichlet_alpha", s.dirichlet_alpha);
  s.dispersion = parse_dispersion(j.value("dispersion", to_string(s.dispersion)));
  s.walk_steps = j.value("walk_steps", s.walk_steps);
  s.low_step = j.value("low_step", s.low_step);
  s.high_step = j.value("high_step", s.high_step);
  s.truth_resolution = j.value("truth_resolution", s.truth_resolution);
  s.seed = j.value("seed", c.seed);
  s.threads = c.threads;
  return s;
}

json run_surface(const SurfaceArgs& a, const Common& c, std::ostream& out) {
  const json j = a.spec.empty() ? json::object() : read_json(a.spec);
  const auto spec = surface_spec(j, c);
  const auto ds = make_surface_dataset(spec);
  const auto dir = output_dir(c);
  write_tree_file(dir / "vertices.nwk", ds.vertices.vertices());
  write_tree_file(dir / "surface.nwk", ds.surface_points);
  write_tree_file(dir / "data.nwk", ds.data);
  json weights = json::array();
  for (const auto& w : ds.weights) weights.push_back(weights_json(w));
  json truth{{"mode", "surface"},
             {"spec",
              {{"n_taxa", spec.n_taxa},
               {"n_points", spec.n_points},
               {"topo_op", to_string(spec.topo_op)},
               {"op_count", spec.op_count},
               {"gamma_shape", spec.gamma_shape},
               {"gamma_rate", spec.gamma_rate},
               {"dirichlet_alpha", spec.dirichlet_alpha},
               {"dispersion", to_string(spec.dispersion)},
               {"walk_steps", spec.walk_steps},
               {"low_step", spec.low_step},
               {"high_step", spec.high_step},
               {"truth_resolution", spec.truth_resolution},
               {"seed", spec.seed}}},
             {"sum_sq_projected", rounded(ds.truth.sum_sq_projected)},
             {"r_squared", rounded(ds.truth.r_squared)},
             {"weights", weights}};
  write_json(dir / "truth.json", truth);
  if (!c.json_output)
    out << "true D^2 " << format_number(ds.truth.sum_sq_projected) << "  r^2 " << format_number(ds.truth.r_squared) << "\n";
  json brief = truth;
  brief.erase("weights");
  return brief;
}

struct PlotArgs {
  std::string vertices, input;
  std::string method = "geometric";
  int resolution = 50;
  int restarts = 3;
};

json run_plot(const PlotArgs& a, const Common& c, std::ostream& out) {
  const auto vfile = read_trees(a.vertices, c);
  const VertexSet vertices(vfile.trees);
  if (vertices.order() != 2) throw UnsupportedOrder("plot-simplex needs exactly three vertices");
  LatticeOptions lo;
  lo.resolution = a.resolution;
  lo.pendant = c.mode();
  lo.threads = c.threads;
  const auto map = simplex_topology_map(vertices, lo);
  std::vector<std::vector<double>> dots;
  const auto dir = output_dir(c);
  json result{{"resolution", a.resolution}, {"topologies", map.topologies.size()}, {"regions", map.region_count}};
  if (!a.input.empty()) {
    const auto data = read_trees(a.input, c, vfile.leaves);
    const auto rows = project_all(data.trees, vertices, projector(a.method, a.resolution, a.restarts, 0.0, 10, c));
    for (const auto& r : rows) dots.push_back(r.weights);
    write_text(dir / "projections.csv", projections_csv(rows, 3, *vfile.leaves));
    result["data"] = data.trees.size();
  }
  write_text(dir / "simplex.svg", simplex_svg(map, *vfile.leaves, dots));
  write_text(dir / "lattice.csv", lattice_csv(map, *vfile.leaves));
  json labels = json::array();
  for (const auto& t : map.topologies) labels.push_back(t.to_string(*vfile.leaves));
  result["topology_labels"] = labels;
  if (!c.json_output) {
    out << map.topologies.size() << " topologies in " << map.region_count << " regions\n";
    for (std::size_t i = 0; i < map.topologies.size(); ++i) out << i << ": " << map.topologies[i].to_string(*vfile.leaves) << "\n";
  }
  return result;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Principal components in phylogenetic tree space", "treepca"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common common;
  GeodesicArgs ga;
  MeanArgs ma;
  ProjectArgs pa;
  PcaArgs ca;
  CoalescentArgs sa;
  QuadrupleArgs qa;
  SurfaceArgs fa;
  PlotArgs la;

  auto* geo = app.add_subcommand("geodesic", "Distance and geodesic between two trees");
  geo->add_option("source", ga.source, "Newick file (first tree used)")->required();
  geo->add_option("target", ga.target, "Newick file (first tree used)")->required();
  geo->add_option("--t", ga.t, "Emit the tree a proportion t along the geodesic")->check(CLI::Range(0.0, 1.0));
  geo->add_flag("--support", ga.support, "Emit the (A, B, C) support");
  add_common(geo, common);

  auto* mean = app.add_subcommand("mean", "Weighted Frechet mean");
  mean->add_option("--input", ma.input, "Newick trees, one per line")->required();
  mean->add_option("--weights", ma.weights, "CSV of weights, one row per tree");
  mean->add_option("--method", ma.method, "cyclic, sturm or refined")
      ->check(CLI::IsMember({"cyclic", "sturm", "refined"}))
      ->capture_default_str();
  mean->add_option("--eps", ma.eps, "Convergence tolerance (0: 1e-4 x data scale)")->capture_default_str();
  mean->add_option("--window", ma.window, "Convergence window")->capture_default_str();
  mean->add_option("--max-iter", ma.max_iter, "Iteration cap")->capture_default_str();
  add_common(mean, common);

  auto* project = app.add_subcommand("project", "Project trees onto the surface spanned by vertex trees");
  project->add_option("--vertices", pa.vertices, "Newick vertex trees")->required();
  project->add_option("--input", pa.input, "Newick data trees")->required();
  project->add_option("--method", pa.method, "geometric or exhaustive")
      ->check(CLI::IsMember({"geometric", "exhaustive"}))
      ->capture_default_str();
  project->add_option("--resolution", pa.resolution, "Lattice resolution (exhaustive)")->capture_default_str();
  project->add_option("--restarts", pa.restarts, "Restarts (geometric)")->capture_default_str();
  project->add_option("--eps", pa.eps, "Convergence tolerance (0: 1e-3 x vertex scale)")->capture_default_str();
  project->add_option("--window", pa.window, "Convergence window")->capture_default_str();
  add_common(project, common);

  auto* pca = app.add_subcommand("pca", "Fit a principal geodesic (order 1) or surface (order 2)");
  pca->add_option("--input", ca.input, "Newick data trees")->required();
  pca->add_option("--order", ca.order, "1 or 2")->check(CLI::IsMember({1, 2}))->capture_default_str();
  pca->add_option("--restarts", ca.restarts, "Independent searches")->capture_default_str();
  pca->add_option("--kernels", ca.kernels, "JSON proposal kernel list");
  pca->add_option("--conv-window", ca.conv_window, "Sweeps compared for convergence")->capture_default_str();
  pca->add_option("--conv-threshold", ca.conv_threshold, "Relative improvement threshold")->capture_default_str();
  pca->add_option("--max-sweeps", ca.max_sweeps, "Sweep cap per search")->capture_default_str();
  pca->add_option("--search-eps", ca.search_eps, "Projection tolerance during the search (0: 1e-2 x data scale)")->capture_default_str();
  pca->add_option("--report-method", ca.report_method, "Projector for the reported statistics")
      ->check(CLI::IsMember({"geometric", "exhaustive"}))
      ->capture_default_str();
  pca->add_option("--resolution", ca.resolution, "Lattice resolution for an exhaustive report")->capture_default_str();
  add_common(pca, common);

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic data");
  simulate->require_subcommand(1);
  auto* coal = simulate->add_subcommand("coalescent", "Kingman coalescent trees");
  coal->add_option("--taxa", sa.taxa, "Number of non-root leaves")->capture_default_str();
  coal->add_option("--count", sa.count, "Number of trees")->capture_default_str();
  add_common(coal, common);
  auto* quad = simulate->add_subcommand("quadruple", "Species tree, three vertex gene trees and a test gene tree");
  quad->add_option("--taxa", qa.taxa, "Number of non-root leaves")->capture_default_str();
  quad->add_option("--count", qa.count, "Number of quadruples")->capture_default_str();
  quad->add_option("--theta", qa.theta, "Population size scale")->capture_default_str();
  add_common(quad, common);
  auto* surf = simulate->add_subcommand("surface", "Dispersed sample around a known surface");
  surf->add_option("--spec", fa.spec, "JSON dataset spec (missing fields take defaults)");
  add_common(surf, common);

  auto* plot = app.add_subcommand("plot-simplex", "Ternary topology map of a surface as SVG");
  plot->add_option("--vertices", la.vertices, "Three Newick vertex trees")->required();
  plot->add_option("--input", la.input, "Data trees to show as projected dots");
  plot->add_option("--method", la.method, "Projector for the dots")
      ->check(CLI::IsMember({"geometric", "exhaustive"}))
      ->capture_default_str();
  plot->add_option("--resolution", la.resolution, "Lattice resolution")->capture_default_str();
  plot->add_option("--restarts", la.restarts, "Restarts (geometric)")->capture_default_str();
  add_common(plot, common);

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* command = nullptr;
  try {
    json result;
    if (geo->parsed()) {
      command = geo;
      result = run_geodesic(ga, common, out);
    } else if (mean->parsed()) {
      command = mean;
      result = run_mean(ma, common, out);
    } else if (project->parsed()) {
      command = project;
      result = run_project(pa, common, out);
    } else if (pca->parsed()) {
      command = pca;
      result = run_pca(ca, common, out);
    } else if (coal->parsed()) {
      command = coal;
      result = run_coalescent(sa, common, out);
    } else if (quad->parsed()) {
      command = quad;
      result = run_quadruple(qa, common, out);
    } else if (surf->parsed()) {
      command = surf;
      result = run_surface(fa, common, out);
    } else if (plot->parsed()) {
      command = plot;
      result = run_plot(la, common, out);
    }
    write_json(output_dir(common) / "run.json", run_record(command, common));
    if (common.json_output) out << result.dump(2) << "\n";
    return kExitOk;
  } catch (const ParameterOutOfRange& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedOrder& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: bad JSON input: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace treepca
