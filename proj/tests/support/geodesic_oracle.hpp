#pragma once

#include <vector>

#include "treepca/tree.hpp"

namespace treepca::testing {

struct OracleSupport {
  std::vector<std::vector<Split>> a;
  std::vector<std::vector<Split>> b;
  double squared_length = 0.0;
};

// Exhaustive search over every ordered decomposition (A^(1..l), B^(1..l)) of
// the non-common splits that is a valid path (A^(i) compatible with B^(j)
// for i > j) with nondecreasing ratios |A^(j)|/|B^(j)|, minimising
// ||A + B||^2 + ||C - D||^2. Independent of the max-flow construction.
// Practical for up to ~4 non-common splits per tree.
OracleSupport brute_force_support(const PhyloTree& x, const PhyloTree& y, PendantMode mode = PendantMode::ignore);

double brute_force_distance(const PhyloTree& x, const PhyloTree& y, PendantMode mode = PendantMode::ignore);

}  // namespace treepca::testing
