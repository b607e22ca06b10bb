#pragma once

#include <random>
#include <vector>

#include "treepca/tree.hpp"

namespace treepca::testing {

// Random fully resolved topology (uniform random joining), lengths
// Uniform(0.1, 2) for internal and pendant edges.
PhyloTree random_resolved_tree(const LeafSetPtr& leaves, std::mt19937_64& rng, bool with_pendants = true);

// Contracts each internal edge independently with probability `drop`.
PhyloTree random_contraction(const PhyloTree& tree, double drop, std::mt19937_64& rng);

// Removes `remove` random internal splits of `tree` and refines back to a
// resolved tree with fresh random splits and lengths. Gives trees that share
// part of their structure with the input.
PhyloTree random_neighbour(const PhyloTree& tree, int remove, std::mt19937_64& rng);

// Mixture of the above, used for property tests.
PhyloTree random_tree_near(const PhyloTree& base, std::mt19937_64& rng);

}  // namespace treepca::testing
