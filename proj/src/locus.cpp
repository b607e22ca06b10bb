#include "treepca/locus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "treepca/errors.hpp"
#include "treepca/geodesic.hpp"
#include "treepca/parallel.hpp"

namespace treepca {

VertexSet::VertexSet(std::vector<PhyloTree> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw InsufficientData("a vertex set needs at least two trees");
  for (const auto& v : vertices_) {
    if (!same_leaves(v.leaves(), vertices_[0].leaves())) throw LeafSetMismatch("vertex trees use different leaf sets");
  }
}

SimplexPoint::SimplexPoint(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ParameterOutOfRange("empty weight vector");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterOutOfRange("weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ParameterOutOfRange("weights sum to " + std::to_string(sum) + ", not 1");
  if (std::abs(sum - 1.0) > kSumTolerance) {
    for (double& v : p_) v /= sum;
  }
}

SimplexPoint SimplexPoint::vertex(std::size_t size, std::size_t index) {
  std::vector<double> p(size, 0.0);
  p.at(index) = 1.0;
  return SimplexPoint(std::move(p));
}

MeanMethod parse_mean_method(const std::string& text) {
  if (text == "cyclic") return MeanMethod::cyclic;
  if (text == "sturm") return MeanMethod::sturm;
  if (text == "refined") return MeanMethod::refined;
  throw ParameterOutOfRange("unknown mean method '" + text + "' (expected cyclic, sturm or refined)");
}

std::string to_string(MeanMethod method) {
  switch (method) {
    case MeanMethod::cyclic: return "cyclic";
    case MeanMethod::sturm: return "sturm";
    case MeanMethod::refined: return "refined";
  }
  return "cyclic";
}

ProjectorMethod parse_projector_method(const std::string& text) {
  if (text == "geometric") return ProjectorMethod::geometric;
  if (text == "exhaustive") return ProjectorMethod::exhaustive;
  throw ParameterOutOfRange("unknown projection method '" + text + "' (expected geometric or exhaustive)");
}

std::string to_string(ProjectorMethod method) { return method == ProjectorMethod::exhaustive ? "exhaustive" : "geometric"; }

namespace {

// Vertices with positive weight, or nothing when more than two.
std::vector<std::size_t> small_support(const SimplexPoint& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out.push_back(i);
  }
  if (out.size() > 2) out.clear();
  return out;
}

PhyloTree exact_point(const VertexSet& vertices, const SimplexPoint& p, const std::vector<std::size_t>& support, PendantMode mode) {
  if (support.size() == 1) return vertices[support[0]].restricted(mode);
  const Geodesic g(vertices[support[0]], vertices[support[1]], mode);
  return g.at(p[support[1]]);
}

void check_size(const VertexSet& vertices, const SimplexPoint& p) {
  if (p.size() != vertices.size()) {
    throw ParameterOutOfRange("weight vector has " + std::to_string(p.size()) + " entries for " +
                              std::to_string(vertices.size()) + " vertices");
  }
}

PhyloTree refined_point(const WeightedSample& sample, const MeanOptions& mean) {
  MeanOptions coarse = mean;
  if (coarse.eps <= 0.0) coarse.eps = 1e-3 * data_scale(sample.trees(), mean.pendant);
  const auto start = cyclic_mean(sample, coarse);
  RefineOptions ro;
  ro.pendant = mean.pendant;
  return refine_mean(sample, start.mean, ro).mean;
}

}  // namespace

PhyloTree surface_point(const VertexSet& vertices, const SimplexPoint& p, const SurfaceOptions& options) {
  check_size(vertices, p);
  const PendantMode mode = options.mean.pendant;
  const auto support = small_support(p);
  if (!support.empty()) return exact_point(vertices, p, support, mode);
  const WeightedSample sample(vertices.vertices(), p.weights());
  switch (options.method) {
    case MeanMethod::sturm: return sturm_mean(sample, options.seed, options.mean).mean;
    case MeanMethod::refined: return refined_point(sample, options.mean);
    case MeanMethod::cyclic: break;
  }
  return cyclic_mean(sample, options.mean).mean;
}

PhyloTree surface_point_from(const VertexSet& vertices, const SimplexPoint& p, const PhyloTree& start, PendantMode mode) {
  check_size(vertices, p);
  const auto support = small_support(p);
  if (!support.empty()) return exact_point(vertices, p, support, mode);
  const WeightedSample sample(vertices.vertices(), p.weights());
  RefineOptions ro;
  ro.pendant = mode;
  auto warm = refine_mean(sample, start, ro);
  if (warm.certified) return warm.mean;
  MeanOptions mo;
  mo.pendant = mode;
  const auto fresh = refine_mean(sample, cyclic_mean(sample, mo).mean, ro);
  return fresh.objective < warm.objective ? fresh.mean : warm.mean;
}

// ---------------------------------------------------------------------------

SurfaceLattice surface_lattice(const VertexSet& vertices, const LatticeOptions& options) {
  const int k = vertices.order();
  if (k > 2) throw UnsupportedOrder("lattice search supports k = 1 or 2, got k = " + std::to_string(k));
  const int r = options.resolution;
  if (r < 2) throw ParameterOutOfRange("lattice resolution must be at least 2");
  const double rd = static_cast<double>(r);

  SurfaceLattice lattice;
  lattice.resolution = r;
  if (k == 1) {
    const Geodesic g(vertices[0], vertices[1], options.pendant);
    for (int a = 0; a <= r; ++a) {
      lattice.weights.push_back({a / rd, (r - a) / rd});
      lattice.points.push_back(g.at((r - a) / rd));
    }
    return lattice;
  }

  // Rows of fixed a; each row is walked with b increasing, warm-starting
  // every point from its predecessor. The row start lies on an edge of the
  // simplex and is exact.
  std::vector<std::size_t> row_offset(static_cast<std::size_t>(r) + 2, 0);
  for (int a = 0; a <= r; ++a) row_offset[static_cast<std::size_t>(a) + 1] = row_offset[static_cast<std::size_t>(a)] + static_cast<std::size_t>(r - a + 1);
  const std::size_t total = row_offset.back();
  lattice.weights.resize(total);
  lattice.points.resize(total);
  parallel_for(static_cast<std::size_t>(r) + 1, options.threads, [&](std::size_t row) {
    const int a = static_cast<int>(row);
    PhyloTree previous;
    for (int b = 0; b <= r - a; ++b) {
      const int c = r - a - b;
      const std::size_t idx = row_offset[row] + static_cast<std::size_t>(b);
      std::vector<double> w{a / rd, b / rd, c / rd};
      const SimplexPoint p(w);
      PhyloTree point;
      const auto support = small_support(p);
      if (!support.empty()) {
        point = exact_point(vertices, p, support, options.pendant);
      } else {
        point = surface_point_from(vertices, p, previous, options.pendant);
      }
      lattice.weights[idx] = std::move(w);
      lattice.points[idx] = point;
      previous = std::move(point);
    }
  });
  return lattice;
}

ProjectionResult exhaustive_project(const PhyloTree& z, const SurfaceLattice& lattice, PendantMode mode, double tie_eps) {
  std::vector<double> d(lattice.points.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = distance(z, lattice.points[i], mode);
  const auto best = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  if (tie_eps <= 0.0) tie_eps = 1e-9 * (1.0 + d[best]);
  ProjectionResult out;
  out.projected = lattice.points[best];
  out.weights = lattice.weights[best];
  out.distance = d[best];
  out.iterations = static_cast<long>(d.size());
  out.restarts_used = 0;
  out.tie_count = static_cast<int>(std::count_if(d.begin(), d.end(), [&](double v) { return v <= d[best] + tie_eps; }));
  return out;
}

ProjectionResult exhaustive_project(const PhyloTree& z, const VertexSet& vertices, const LatticeOptions& options) {
  return exhaustive_project(z, surface_lattice(vertices, options), options.pendant);
}

// ---------------------------------------------------------------------------

double default_projection_eps(const VertexSet& vertices, PendantMode mode) {
  return 1e-3 * data_scale(vertices.vertices(), mode);
}

namespace {

struct Start {
  PhyloTree tree;
  std::vector<double> weights;
};

// Uniform point on the union of the edge geodesics (chosen with probability
// proportional to length).
Start perimeter_start(const VertexSet& vertices, PendantMode mode, std::mt19937_64& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> lengths;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      edges.emplace_back(i, j);
      lengths.push_back(distance(vertices[i], vertices[j], mode));
    }
  }
  // A triangle has only its three sides as perimeter; for k > 2 every edge
  // of the simplex is used.
  std::size_t pick = 0;
  const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  if (total > 0.0) {
    std::discrete_distribution<std::size_t> choose(lengths.begin(), lengths.end());
    pick = choose(rng);
  } else {
    pick = std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng);
  }
  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto [i, j] = edges[pick];
  Start s;
  s.tree = Geodesic(vertices[i], vertices[j], mode).at(t);
  s.weights.assign(vertices.size(), 0.0);
  s.weights[i] = 1.0 - t;
  s.weights[j] = t;
  return s;
}

ProjectionResult single_run(const PhyloTree& z, const VertexSet& vertices, std::mt19937_64& rng, double eps,
                            const GeometricOptions& options) {
  const PendantMode mode = options.pendant;
  auto start = perimeter_start(vertices, mode, rng);
  PhyloTree mu = std::move(start.tree);
  std::vector<double> p = std::move(start.weights);
  ConvergenceMonitor monitor(eps, options.window, mode);
  monitor.push(mu, 0.0);
  ProjectionResult out;
  out.converged = false;
  long i = 0;
  for (; i < options.max_iter; ++i) {
    const double s = 1.0 / static_cast<double>(i + 2);
    std::size_t best_r = 0;
    double best_d = std::numeric_limits<double>::infinity();
    double best_step = 0.0;
    PhyloTree best_y;
    for (std::size_t r = 0; r < vertices.size(); ++r) {
      const Geodesic g(mu, vertices[r], mode);
      PhyloTree y = g.at(s);
      const double d = distance(z, y, mode);
      if (d < best_d) {
        best_d = d;
        best_r = r;
        best_step = s * g.length();
        best_y = std::move(y);
      }
    }
    mu = std::move(best_y);
    for (double& w : p) w *= 1.0 - s;
    p[best_r] += s;
    if (monitor.push(mu, best_step)) {
      out.converged = true;
      ++i;
      break;
    }
  }
  out.iterations = i;
  out.distance = distance(z, mu, mode);
  out.projected = std::move(mu);
  out.weights = std::move(p);
  return out;
}

}  // namespace

ProjectionResult geometric_project(const PhyloTree& z, const VertexSet& vertices, std::uint64_t seed, const GeometricOptions& options) {
  if (options.restarts < 1) throw ParameterOutOfRange("restarts must be at least 1");
  if (!same_leaves(z.leaves(), vertices.leaves())) throw LeafSetMismatch("datum and vertices use different leaf sets");
  const double eps = options.eps > 0.0 ? options.eps : default_projection_eps(vertices, options.pendant);
  ProjectionResult best;
  best.distance = std::numeric_limits<double>::infinity();
  long iterations = 0;
  for (int r = 0; r < options.restarts; ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    auto run = single_run(z, vertices, rng, eps, options);
    iterations += run.iterations;
    if (run.distance < best.distance) best = std::move(run);
  }
  // The iteration only approaches a vertex; take it outright when it is closer.
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    const double d = distance(z, vertices[j], options.pendant);
    if (d < best.distance) {
      best.distance = d;
      best.projected = vertices[j].restricted(options.pendant);
      best.weights = SimplexPoint::vertex(vertices.size(), j).weights();
    }
  }
  best.iterations = iterations;
  best.restarts_used = options.restarts;
  return best;
}

// ---------------------------------------------------------------------------

std::vector<ProjectionResult> project_all(const std::vector<PhyloTree>& data, const VertexSet& vertices, const ProjectorConfig& config) {
  if (data.empty()) throw EmptyData("no data trees to project");
  std::vector<ProjectionResult> out(data.size());
  if (config.method == ProjectorMethod::exhaustive) {
    LatticeOptions lo;
    lo.resolution = config.resolution;
    lo.pendant = config.geometric.pendant;
    lo.threads = config.threads;
    const auto lattice = surface_lattice(vertices, lo);
    parallel_for(data.size(), config.threads, [&](std::size_t i) { out[i] = exhaustive_project(data[i], lattice, lo.pendant); });
    return out;
  }
  GeometricOptions go = config.geometric;
  if (go.eps <= 0.0) go.eps = default_projection_eps(vertices, go.pendant);
  parallel_for(data.size(), config.threads, [&](std::size_t i) {
    out[i] = geometric_project(data[i], vertices, derive_seed(config.seed, i), go);
  });
  return out;
}

FitStatistics fit_statistics(const std::vector<PhyloTree>& data, std::vector<ProjectionResult> projections, PendantMode mode) {
  if (data.size() != projections.size()) throw ParameterOutOfRange("one projection per datum expected");
  FitStatistics stats;
  std::vector<PhyloTree> projected;
  for (const auto& pr : projections) {
    stats.sum_sq_projected += pr.distance * pr.distance;
    projected.push_back(pr.projected);
  }
  const WeightedSample sample(projected);
  MeanOptions mo;
  mo.pendant = mode;
  RefineOptions ro;
  ro.pendant = mode;
  stats.mean_of_projections = refine_mean(sample, cyclic_mean(sample, mo).mean, ro).mean;
  double spread = 0.0;
  for (const auto& t : projected) {
    const double d = distance(stats.mean_of_projections, t, mode);
    spread += d * d;
  }
  const double total = stats.sum_sq_projected + spread;
  stats.r_squared = total > 0.0 ? spread / total : 0.0;
  stats.per_datum = std::move(projections);
  return stats;
}

FitStatistics sum_sq_projected(const std::vector<PhyloTree>& data, const VertexSet& vertices, const ProjectorConfig& config) {
  return fit_statistics(data, project_all(data, vertices, config), config.geometric.pendant);
}

// ---------------------------------------------------------------------------

namespace {

TopologyId visible_topology(const PhyloTree& t) {
  const double floor = 1e-9 * (1.0 + norm(t));
  std::vector<Split> splits;
  for (const auto& e : t.internal_edges()) {
    if (e.length > floor) splits.push_back(e.split);
  }
  return TopologyId(std::move(splits));
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

TopologyMap simplex_topology_map(const SurfaceLattice& lattice) {
  if (lattice.weights.empty() || lattice.weights[0].size() != 3) throw UnsupportedOrder("topology maps need k = 2");
  const int r = lattice.resolution;
  TopologyMap map;
  map.resolution = r;
  std::map<TopologyId, std::size_t> seen;
  for (std::size_t i = 0; i < lattice.points.size(); ++i) {
    TopologyCell cell;
    cell.weights = lattice.weights[i];
    cell.topology = visible_topology(lattice.points[i]);
    if (seen.emplace(cell.topology, map.topologies.size()).second) map.topologies.push_back(cell.topology);
    map.cells.push_back(std::move(cell));
  }
  std::vector<std::size_t> offset(static_cast<std::size_t>(r) + 1, 0);
  for (int a = 1; a <= r; ++a) offset[static_cast<std::size_t>(a)] = offset[static_cast<std::size_t>(a) - 1] + static_cast<std::size_t>(r - a + 2);
  auto index = [&](int a, int b) { return offset[static_cast<std::size_t>(a)] + static_cast<std::size_t>(b); };
  std::vector<std::size_t> parent(map.cells.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto join = [&](std::size_t x, std::size_t y) {
    if (map.cells[x].topology != map.cells[y].topology) return;
    parent[find_root(parent, x)] = find_root(parent, y);
  };
  for (int a = 0; a <= r; ++a) {
    for (int b = 0; b <= r - a; ++b) {
      // Right, up and up-left neighbours cover all six directions.
      if (b + 1 <= r - a) join(index(a, b), index(a, b + 1));
      if (a + 1 <= r && b <= r - a - 1) join(index(a, b), index(a + 1, b));
      if (a + 1 <= r && b >= 1) join(index(a, b), index(a + 1, b - 1));
    }
  }
  std::map<std::size_t, int> label;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const auto root = find_root(parent, i);
    auto [it, fresh] = label.emplace(root, map.region_count);
    if (fresh) ++map.region_count;
    map.cells[i].region = it->second;
  }
  return map;
}

TopologyMap simplex_topology_map(const VertexSet& vertices, const LatticeOptions& options) {
  if (vertices.order() != 2) throw UnsupportedOrder("topology maps need k = 2");
  return simplex_topology_map(surface_lattice(vertices, options));
}

}  // namespace treepca
