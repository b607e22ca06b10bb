#include "treepca/moves.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "treepca/errors.hpp"
#include "treepca/topology.hpp"

namespace treepca {

double GammaLengths::draw(std::mt19937_64& rng) const {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

namespace {

struct Rooted {
  const LeafSet& leaves;
  std::map<std::uint64_t, double> length;  // every split of the tree, pendants included

  explicit Rooted(const PhyloTree& t) : leaves(*t.leaves()) {
    for (const auto& e : t.edges()) length[e.split.mask()] = e.length;
  }

  std::vector<Split> internal() const {
    std::vector<Split> out;
    for (const auto& [m, l] : length) {
      if (std::popcount(m) > 1) out.push_back(Split(m));
    }
    return out;
  }

  // Node whose children include `cluster`.
  ClusterNode parent_of(std::uint64_t cluster) const {
    for (const auto& node : cluster_nodes(internal(), leaves)) {
      if (std::find(node.children.begin(), node.children.end(), cluster) != node.children.end()) return node;
    }
    throw InvalidEdge("cluster " + Split(cluster).to_string() + " is not in the tree");
  }

  ClusterNode node_of(std::uint64_t cluster) const {
    for (const auto& node : cluster_nodes(internal(), leaves)) {
      if (node.mask == cluster) return node;
    }
    throw InvalidEdge("split " + Split(cluster).to_string() + " is not an internal split of the tree");
  }

  PhyloTree build(const LeafSetPtr& ptr) const {
    std::vector<Edge> edges;
    for (const auto& [m, l] : length) edges.push_back({Split(m), l});
    return PhyloTree::validated(ptr, std::move(edges));
  }
};

}  // namespace

PhyloTree nni(const PhyloTree& tree, Split edge, int choice, const GammaLengths& lengths, std::mt19937_64& rng) {
  if (edge.is_pendant() || !tree.contains(edge)) throw InvalidEdge("NNI needs an internal split of the tree");
  if (choice != 0 && choice != 1) throw InvalidEdge("NNI choice must be 0 or 1");
  Rooted r(tree);
  const auto below = r.node_of(edge.mask());
  const auto above = r.parent_of(edge.mask());
  if (below.children.size() != 2 || above.children.size() != 2) throw InvalidEdge("NNI needs binary nodes at both ends of the edge");
  const std::uint64_t sibling = above.children[0] == edge.mask() ? above.children[1] : above.children[0];
  const std::uint64_t kept = below.children[choice == 0 ? 1 : 0];
  r.length.erase(edge.mask());
  r.length[kept | sibling] = lengths.draw(rng);
  return r.build(tree.leaves());
}

PhyloTree spr(const PhyloTree& tree, Split prune, std::uint64_t graft, const GammaLengths& lengths, std::mt19937_64& rng) {
  const std::uint64_t p = prune.mask();
  const std::uint64_t full = tree.leaves()->full_mask();
  if (p == 0 || (p & ~full) || p == full) throw InvalidEdge("invalid prune split");
  if (std::popcount(p) > 1 && !tree.contains(prune)) throw InvalidEdge("prune split is not in the tree");
  if ((graft & p) || graft == 0 || (graft & ~full)) throw InvalidGraft("graft position must lie outside the pruned subtree");
  Rooted r(tree);
  const auto parent = r.parent_of(p);
  if (parent.children.size() != 2) throw InvalidEdge("SPR needs the pruned subtree's parent to be binary");
  const std::uint64_t sibling = parent.children[0] == p ? parent.children[1] : parent.children[0];

  // Split the tree into the pruned subtree and the rest. The parent node
  // disappears: its edge merges into the sibling's, and its ancestors lose
  // the pruned leaves.
  const bool parent_is_top = parent.mask == full;
  std::map<std::uint64_t, double> subtree, pruned;
  for (const auto& [m, l] : r.length) {
    if ((m & p) == m) {
      subtree[m] = l;
    } else if ((m & p) == p) {
      if (m != parent.mask) pruned[m & ~p] = l;
    } else {
      pruned[m] = l;
    }
  }
  if (parent_is_top) {
    pruned.erase(sibling);  // the sibling becomes the top node
  } else if (r.length.count(parent.mask) && (r.length.count(sibling) || std::popcount(sibling) > 1)) {
    pruned[sibling] += r.length[parent.mask];
  }

  const std::uint64_t top = full & ~p;
  if (graft != top && !pruned.count(graft) && std::popcount(graft) != 1) throw InvalidGraft("graft cluster is not in the pruned tree");
  if (graft == sibling) throw InvalidGraft("grafting onto the sibling edge leaves the tree unchanged");
  if (parent_is_top && graft == top) throw InvalidGraft("grafting above the top leaves the tree unchanged");

  std::map<std::uint64_t, double> out;
  for (const auto& [m, l] : pruned) {
    // Ancestors of the graft cluster gain the pruned leaves.
    out[((m & graft) == graft && m != graft) ? (m | p) : m] = l;
  }
  for (const auto& [m, l] : subtree) out[m] = l;
  out[graft == top ? top : (graft | p)] = lengths.draw(rng);
  std::vector<Edge> edges;
  for (const auto& [m, l] : out) {
    if (l > 0.0) edges.push_back({Split(m), l});
  }
  return PhyloTree::validated(tree.leaves(), std::move(edges));
}

PhyloTree random_nni(const PhyloTree& tree, const GammaLengths& lengths, std::mt19937_64& rng) {
  std::vector<std::pair<Split, int>> moves;
  Rooted r(tree);
  for (Split s : r.internal()) {
    if (r.node_of(s.mask()).children.size() == 2 && r.parent_of(s.mask()).children.size() == 2) {
      moves.emplace_back(s, 0);
      moves.emplace_back(s, 1);
    }
  }
  if (moves.empty()) throw InvalidEdge("tree has no internal edge admitting an NNI");
  const auto [s, c] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
  return nni(tree, s, c, lengths, rng);
}

PhyloTree random_spr(const PhyloTree& tree, const GammaLengths& lengths, std::mt19937_64& rng) {
  const std::uint64_t full = tree.leaves()->full_mask();
  std::vector<std::uint64_t> clusters;
  for (int leaf = 1; leaf <= tree.n(); ++leaf) clusters.push_back(std::uint64_t{1} << leaf);
  for (const auto& e : tree.internal_edges()) clusters.push_back(e.split.mask());
  std::sort(clusters.begin(), clusters.end());
  clusters.erase(std::unique(clusters.begin(), clusters.end()), clusters.end());
  const Rooted r(tree);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> moves;
  for (auto p : clusters) {
    const auto parent = r.parent_of(p);
    if (parent.children.size() != 2) continue;
    const std::uint64_t sibling = parent.children[0] == p ? parent.children[1] : parent.children[0];
    const std::uint64_t top = full & ~p;
    // Graft targets: clusters of the pruned tree (top included).
    std::vector<std::uint64_t> targets{top};
    for (auto m : clusters) {
      if ((m & p) || m == parent.mask) continue;
      targets.push_back(m);
    }
    for (auto m : clusters) {
      if ((m & p) == p && m != p && m != parent.mask) targets.push_back(m & ~p);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (auto g : targets) {
      if (g == sibling) continue;
      if (parent.mask == full && g == top) continue;
      moves.emplace_back(p, g);
    }
  }
  if (moves.empty()) throw InvalidEdge("tree admits no SPR move");
  const auto [p, g] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
  return spr(tree, Split(p), g, lengths, rng);
}

PhyloTree random_walk(const PhyloTree& tree, int steps, double step_size, std::mt19937_64& rng) {
  if (steps < 1) throw ParameterOutOfRange("random walk needs at least one step");
  if (!(step_size > 0.0)) throw ParameterOutOfRange("random walk step size must be positive");
  std::normal_distribution<double> noise(0.0, step_size);
  std::bernoulli_distribution graft(0.5);
  const auto& leaves = *tree.leaves();
  std::map<std::uint64_t, double> length;
  for (const auto& e : tree.edges()) length[e.split.mask()] = e.length;

  for (int step = 0; step < steps; ++step) {
    std::vector<std::pair<std::uint64_t, double>> crossed;
    for (auto& [m, l] : length) {
      if (std::popcount(m) == 1) continue;
      l += noise(rng);
      if (l <= 0.0) crossed.emplace_back(m, -l);
    }
    for (const auto& [m, overshoot] : crossed) {
      length.erase(m);
      if (!graft(rng) || overshoot <= 0.0) continue;
      // Polytomy left by the removal: the node whose children now include
      // the removed split's children.
      std::vector<Split> internal;
      for (const auto& [mm, l] : length) {
        if (std::popcount(mm) > 1) internal.push_back(Split(mm));
      }
      const auto nodes = cluster_nodes(internal, leaves);
      const ClusterNode* node = nullptr;
      for (const auto& nd : nodes) {
        if ((nd.mask & m) == m && (!node || std::popcount(nd.mask) < std::popcount(node->mask))) node = &nd;
      }
      const auto& kids = node->children;
      const std::size_t k = kids.size();
      std::vector<std::uint64_t> options;
      if (k <= 20) {
        for (std::uint32_t subset = 1; subset < (1U << k); ++subset) {
          const int size = std::popcount(subset);
          if (size < 2 || size > static_cast<int>(k) - 1) continue;
          std::uint64_t mask = 0;
          for (std::size_t i = 0; i < k; ++i) {
            if ((subset >> i) & 1U) mask |= kids[i];
          }
          if (mask != m) options.push_back(mask);
        }
      }
      if (options.empty()) continue;
      const auto pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      length[pick] = overshoot;
    }
  }
  std::vector<Edge> edges;
  for (const auto& [m, l] : length) edges.push_back({Split(m), l});
  return PhyloTree::validated(tree.leaves(), std::move(edges));
}

}  // namespace treepca
