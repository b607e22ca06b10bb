#include "treepca/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "treepca/errors.hpp"
#include "treepca/parallel.hpp"
#include "treepca/refine.hpp"
#include "treepca/topology.hpp"

namespace treepca {

namespace {

struct Lineage {
  std::uint64_t mask;
  double height;
};

// Merges lineages at the given rate until `limit` (infinity: until one is
// left), recording each merged cluster's children edges.
void coalesce(std::vector<Lineage>& lineages, double start, double limit, double rate_scale, std::mt19937_64& rng,
              std::map<std::uint64_t, double>& edges) {
  double now = start;
  while (lineages.size() > 1) {
    const double k = static_cast<double>(lineages.size());
    const double wait = std::exponential_distribution<double>(k * (k - 1.0) / 2.0 / rate_scale)(rng);
    if (now + wait >= limit) return;
    now += wait;
    std::uniform_int_distribution<std::size_t> pick(0, lineages.size() - 1);
    std::size_t i = pick(rng), j = pick(rng);
    while (j == i) j = pick(rng);
    if (i > j) std::swap(i, j);
    const Lineage a = lineages[i], b = lineages[j];
    edges[a.mask] = now - a.height;
    edges[b.mask] = now - b.height;
    lineages.erase(lineages.begin() + static_cast<std::ptrdiff_t>(j));
    lineages[i] = {a.mask | b.mask, now};
  }
}

PhyloTree from_edges(const LeafSetPtr& leaves, const std::map<std::uint64_t, double>& edges) {
  std::vector<Edge> out;
  for (const auto& [m, l] : edges) {
    // The two clusters under the final merge: the one equal to the full set
    // never occurs, and lengths of zero mean simultaneous events.
    if (m == leaves->full_mask() || !(l > 0.0)) continue;
    out.push_back({Split(m), l});
  }
  return PhyloTree::validated(leaves, std::move(out));
}

}  // namespace

PhyloTree kingman_tree(int n_taxa, std::mt19937_64& rng) {
  if (n_taxa < 2) throw ParameterOutOfRange("the coalescent needs at least two taxa");
  const auto leaves = LeafSet::numbered(n_taxa);
  std::vector<Lineage> lineages;
  for (int i = 1; i <= n_taxa; ++i) lineages.push_back({std::uint64_t{1} << i, 0.0});
  std::map<std::uint64_t, double> edges;
  coalesce(lineages, 0.0, std::numeric_limits<double>::infinity(), 1.0, rng, edges);
  return from_edges(leaves, edges);
}

PhyloTree kingman_tree(int n_taxa, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return kingman_tree(n_taxa, rng);
}

PhyloTree constrained_gene_tree(const PhyloTree& species, std::mt19937_64& rng, double theta) {
  if (!(theta > 0.0)) throw ParameterOutOfRange("theta must be positive");
  const auto& leaves = *species.leaves();
  const auto nodes = cluster_nodes(species.topology().splits(), leaves);
  // Heights measured downwards from the root, then shifted so every branch
  // runs upwards from its lower end.
  std::map<std::uint64_t, double> depth;
  depth[leaves.full_mask()] = 0.0;
  for (const auto& node : nodes) {  // top node first, parents before children
    for (auto c : node.children) depth[c] = depth[node.mask] + species.length(Split(c));
  }
  double deepest = 0.0;
  for (const auto& [m, d] : depth) deepest = std::max(deepest, d);

  std::map<std::uint64_t, double> edges;
  std::map<std::uint64_t, std::vector<Lineage>> entering;  // lineages at the bottom of each species node
  for (int i = 1; i <= leaves.n(); ++i) {
    const std::uint64_t m = std::uint64_t{1} << i;
    entering[m].push_back({m, deepest - depth[m]});
  }
  // Children before parents: reverse of the top-down node order. Each
  // species branch (cluster c with parent node P) runs from height(c) to
  // height(P).
  std::vector<std::uint64_t> order;
  for (const auto& node : nodes) order.push_back(node.mask);
  std::map<std::uint64_t, std::uint64_t> parent;
  for (const auto& node : nodes) {
    for (auto c : node.children) parent[c] = node.mask;
  }
  std::vector<std::uint64_t> clusters;
  for (const auto& [m, p] : parent) clusters.push_back(m);
  std::sort(clusters.begin(), clusters.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) != std::popcount(b) ? std::popcount(a) < std::popcount(b) : a < b;
  });
  for (auto c : clusters) {
    auto lineages = std::move(entering[c]);
    const double low = deepest - depth[c];
    const double high = deepest - depth[parent[c]];
    coalesce(lineages, low, high, theta, rng, edges);
    auto& up = entering[parent[c]];
    up.insert(up.end(), lineages.begin(), lineages.end());
  }
  auto lineages = std::move(entering[leaves.full_mask()]);
  coalesce(lineages, deepest, std::numeric_limits<double>::infinity(), theta, rng, edges);
  return from_edges(species.leaves(), edges);
}

TopologyMove parse_topology_move(const std::string& text) {
  if (text == "nni" || text == "NNI") return TopologyMove::nni;
  if (text == "spr" || text == "SPR") return TopologyMove::spr;
  throw ParameterOutOfRange("unknown topology move '" + text + "' (expected nni or spr)");
}

std::string to_string(TopologyMove move) { return move == TopologyMove::spr ? "spr" : "nni"; }

Dispersion parse_dispersion(const std::string& text) {
  if (text == "none") return Dispersion::none;
  if (text == "low") return Dispersion::low;
  if (text == "high") return Dispersion::high;
  throw ParameterOutOfRange("unknown dispersion '" + text + "' (expected none, low or high)");
}

std::string to_string(Dispersion dispersion) {
  switch (dispersion) {
    case Dispersion::none: return "none";
    case Dispersion::low: return "low";
    case Dispersion::high: return "high";
  }
  return "low";
}

double SurfaceDatasetSpec::step_fraction() const {
  switch (dispersion) {
    case Dispersion::none: return 0.0;
    case Dispersion::low: return low_step;
    case Dispersion::high: return high_step;
  }
  return 0.0;
}

namespace {

std::vector<double> dirichlet(const std::vector<double>& alpha, std::mt19937_64& rng) {
  std::vector<double> out;
  double sum = 0.0;
  for (double a : alpha) {
    out.push_back(std::gamma_distribution<double>(a, 1.0)(rng));
    sum += out.back();
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace

SurfaceDataset make_surface_dataset(const SurfaceDatasetSpec& spec) {
  if (spec.n_taxa < 4) throw ParameterOutOfRange("surface datasets need at least 4 taxa");
  if (spec.n_points < 1) throw ParameterOutOfRange("n_points must be positive");
  if (spec.op_count < 0 || spec.walk_steps < 1) throw ParameterOutOfRange("op_count must be >= 0 and walk_steps >= 1");
  if (!(spec.gamma_shape > 0.0) || !(spec.gamma_rate > 0.0)) throw ParameterOutOfRange("gamma parameters must be positive");
  if (spec.dirichlet_alpha.size() != 3) throw ParameterOutOfRange("dirichlet_alpha needs three entries");
  for (double a : spec.dirichlet_alpha) {
    if (!(a > 0.0)) throw ParameterOutOfRange("dirichlet_alpha entries must be positive");
  }
  std::mt19937_64 rng(spec.seed);
  const GammaLengths lengths{spec.gamma_shape, spec.gamma_rate};

  // w0: coalescent topology with gamma lengths on every edge.
  const auto shape = kingman_tree(spec.n_taxa, rng);
  std::vector<Edge> edges;
  for (const auto& e : shape.edges()) edges.push_back({e.split, lengths.draw(rng)});
  for (int leaf = 1; leaf <= spec.n_taxa; ++leaf) {
    const Split s(std::uint64_t{1} << leaf);
    if (!shape.contains(s)) edges.push_back({s, lengths.draw(rng)});
  }
  const auto w0 = PhyloTree::validated(shape.leaves(), std::move(edges));
  std::vector<PhyloTree> w{w0};
  for (int v = 1; v <= 2; ++v) {
    PhyloTree t = w0;
    for (int op = 0; op < spec.op_count; ++op) {
      t = spec.topo_op == TopologyMove::nni ? random_nni(t, lengths, rng) : random_spr(t, lengths, rng);
    }
    w.push_back(t);
  }

  SurfaceDataset out{VertexSet(w), {}, {}, {}, {}};
  for (int i = 0; i < spec.n_points; ++i) out.weights.push_back(dirichlet(spec.dirichlet_alpha, rng));
  const double step = spec.step_fraction() * norm(w0);
  std::vector<std::uint64_t> walk_seeds;
  for (int i = 0; i < spec.n_points; ++i) walk_seeds.push_back(rng());

  out.surface_points.resize(static_cast<std::size_t>(spec.n_points));
  out.data.resize(static_cast<std::size_t>(spec.n_points));
  SurfaceOptions so;
  so.method = MeanMethod::refined;
  parallel_for(static_cast<std::size_t>(spec.n_points), spec.threads, [&](std::size_t i) {
    out.surface_points[i] = surface_point(out.vertices, SimplexPoint(out.weights[i]), so);
    if (step > 0.0) {
      std::mt19937_64 walk_rng(walk_seeds[i]);
      out.data[i] = random_walk(out.surface_points[i], spec.walk_steps, step, walk_rng);
    } else {
      out.data[i] = out.surface_points[i];
    }
  });

  ProjectorConfig pc;
  pc.method = ProjectorMethod::exhaustive;
  pc.resolution = spec.truth_resolution;
  pc.threads = spec.threads;
  out.truth = sum_sq_projected(out.data, out.vertices, pc);
  return out;
}

Quadruple make_quadruple(int n_taxa, std::uint64_t seed, double theta) {
  std::mt19937_64 rng(seed);
  Quadruple q;
  q.species = kingman_tree(n_taxa, rng);
  for (int i = 0; i < 3; ++i) q.vertices.push_back(constrained_gene_tree(q.species, rng, theta));
  q.test = constrained_gene_tree(q.species, rng, theta);
  return q;
}

}  // namespace treepca
