#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treepca/split.hpp"

namespace treepca {

// How pendant (leaf) edges enter distances and norms. Statistics default to
// `ignore`; `include` uses the product structure with the pendant orthant.
enum class PendantMode { ignore, include };

PendantMode parse_pendant_mode(const std::string& text);
std::string to_string(PendantMode mode);

struct Edge {
  Split split;
  double length = 0.0;

  bool operator==(const Edge&) const = default;
};

// Canonical sorted set of internal splits; identifies an orthant.
class TopologyId {
 public:
  TopologyId() = default;
  explicit TopologyId(std::vector<Split> splits);

  const std::vector<Split>& splits() const { return splits_; }
  bool is_star() const { return splits_.empty(); }
  // Splits as label groups, e.g. "B+C D+E"; "star" for the star tree.
  std::string to_string(const LeafSet& leaves) const;

  auto operator<=>(const TopologyId&) const = default;

 private:
  std::vector<Split> splits_;
};

// A point in tree-space: pairwise-compatible splits with positive lengths.
// Immutable after construction.
class PhyloTree {
 public:
  // Equality tolerance on edge lengths.
  static constexpr double kLengthTolerance = 1e-12;

  PhyloTree() = default;

  // Validating constructor: throws NonPositiveLength, DuplicateSplit,
  // IncompatibleSplits, InvalidLeafSet.
  static PhyloTree validated(LeafSetPtr leaves, std::vector<Edge> edges);

  // For callers that produce compatible split sets by construction. Edges
  // with length <= 0 are dropped; the rest are sorted.
  static PhyloTree from_trusted(LeafSetPtr leaves, std::vector<Edge> edges);

  // Star tree with the given pendant lengths (index i-1 for leaf i), or no
  // edges at all if `pendants` is empty.
  static PhyloTree star(LeafSetPtr leaves, std::span<const double> pendants = {});

  const LeafSetPtr& leaves() const { return leaves_; }
  int n() const { return leaves_ ? leaves_->n() : 0; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Length of `s`, 0 when absent.
  double length(Split s) const;
  bool contains(Split s) const;

  std::vector<Edge> internal_edges() const;
  std::size_t internal_count() const;
  bool is_fully_resolved() const;
  TopologyId topology() const;

  PhyloTree without_pendants() const;
  PhyloTree restricted(PendantMode mode) const { return mode == PendantMode::include ? *this : without_pendants(); }

  // Same leaves, same split set, lengths equal within `tolerance`.
  bool equals(const PhyloTree& other, double tolerance = kLengthTolerance) const;

 private:
  PhyloTree(LeafSetPtr leaves, std::vector<Edge> edges) : leaves_(std::move(leaves)), edges_(std::move(edges)) {}

  LeafSetPtr leaves_;
  std::vector<Edge> edges_;  // sorted by split mask
};

inline PhyloTree validate_tree(LeafSetPtr leaves, std::vector<Edge> edges) {
  return PhyloTree::validated(std::move(leaves), std::move(edges));
}

// Euclidean norm of the included edge lengths.
double norm(const PhyloTree& tree, PendantMode mode = PendantMode::ignore);
double squared_norm(const PhyloTree& tree, PendantMode mode = PendantMode::ignore);

// Sum of internal edge lengths.
double total_internal_length(const PhyloTree& tree);

}  // namespace treepca
