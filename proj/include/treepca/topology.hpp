#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treepca/tree.hpp"

namespace treepca {

// A node of the rooted tree hanging below the root leaf. `mask` is the set
// of leaves under it (full_mask for the top node); `children` are the
// masks of the maximal clusters or single leaves strictly inside it.
struct ClusterNode {
  std::uint64_t mask = 0;
  std::vector<std::uint64_t> children;
};

// Nodes for a compatible set of internal splits, top node first.
std::vector<ClusterNode> cluster_nodes(const std::vector<Split>& internal, const LeafSet& leaves);

// Number of resolved topologies refining `internal`, saturated at `cap`.
std::size_t resolution_count(const std::vector<Split>& internal, const LeafSet& leaves, std::size_t cap);

// Every resolved topology (as its full internal split list) containing
// `internal`. Callers bound the work with resolution_count first.
std::vector<std::vector<Split>> resolutions(const std::vector<Split>& internal, const LeafSet& leaves);

// Maximal compatible subsets of `pool`, each joined to `base` and sorted.
// Every pool split must be compatible with base and not in it. Returns
// nullopt once more than `cap` subsets turn up.
std::optional<std::vector<std::vector<Split>>> compatible_extensions(const std::vector<Split>& base,
                                                                     const std::vector<Split>& pool, std::size_t cap);

// The new clusters of every rooted binary tree on `m` items, each cluster a
// bitmask over item indices (sizes 2..m-1). (2m-3)!! entries.
std::vector<std::vector<std::uint32_t>> binary_resolutions(int m);

}  // namespace treepca
