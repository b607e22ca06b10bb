#pragma once

#include <cstdint>
#include <random>

#include "treepca/tree.hpp"

namespace treepca {

// Lengths given to splits created by a topology move.
struct GammaLengths {
  double shape = 2.0;
  double rate = 20.0;

  double draw(std::mt19937_64& rng) const;
};

// Nearest neighbour interchange across internal split `edge` of a resolved
// tree (locally: `edge` and its parent node both binary). With children
// c0 < c1 of `edge` and sibling s, choice 0 creates c1+s and choice 1
// creates c0+s. The new split's length is drawn from `lengths`.
// Throws InvalidEdge.
PhyloTree nni(const PhyloTree& tree, Split edge, int choice, const GammaLengths& lengths, std::mt19937_64& rng);

// Prunes the subtree below `prune` (an internal or pendant split) and
// regrafts it onto the edge above cluster `graft` of the remaining tree;
// graft == complement of prune means the edge above the top node. The split
// created at the graft point gets a length from `lengths`; the two edges
// joined at the prune point are merged. Throws InvalidEdge, InvalidGraft.
PhyloTree spr(const PhyloTree& tree, Split prune, std::uint64_t graft, const GammaLengths& lengths, std::mt19937_64& rng);

// Uniform internal edge and choice.
PhyloTree random_nni(const PhyloTree& tree, const GammaLengths& lengths, std::mt19937_64& rng);
// Uniform over (prune, graft) pairs that change the topology.
PhyloTree random_spr(const PhyloTree& tree, const GammaLengths& lengths, std::mt19937_64& rng);

// `steps` Gaussian steps (sd `step_size`) on the internal edge lengths. A
// length pushed below zero removes its split; with probability 1/2 a
// replacement split from the same polytomy is added with the overshoot as
// length. Pendants are untouched.
PhyloTree random_walk(const PhyloTree& tree, int steps, double step_size, std::mt19937_64& rng);

}  // namespace treepca
