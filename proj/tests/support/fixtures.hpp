#pragma once

#include <array>

#include "treepca/tree.hpp"

namespace treepca::testing {

// The three-tree configuration on leaves 0..5 used throughout the tests.
// Internal splits are identified with R^3:
//   xi1 =  |{2,3}|   or -|{3,4,5}|
//   xi2 =  |{4,5}|   or -|{2,3,4}|
//   xi3 =  |{0,1}|   (the side {2,3,4,5})
// v0 = (1, 1, 2), v1 = (-2, 1, 1), v2 = (1, -2, 1). No pendant edges.
struct Fig1 {
  LeafSetPtr leaves;
  Split s23, s45, s01, s345, s234;
  PhyloTree v0, v1, v2;

  Fig1();

  // Tree at coordinates (xi1, xi2, xi3); requires not (xi1 < 0 and xi2 < 0).
  PhyloTree at(double xi1, double xi2, double xi3) const;
  // Inverse of `at` for trees using only the five splits above.
  std::array<double, 3> coordinates(const PhyloTree& tree) const;
  std::vector<PhyloTree> vertices() const { return {v0, v1, v2}; }
};

const Fig1& fig1();

// Closed-form locus point for weights (p0, p1, p2) on the planar patch:
// (p0 - 2 p1 + p2, p0 + p1 - 2 p2, 1 + p0).
std::array<double, 3> fig1_planar(double p0, double p1, double p2);
// Closed form where the geodesic to v2 passes through the xi1-xi2 origin
// (p0 < 2 p1, mean in v1's orthant, away from the sticky set).
std::array<double, 3> fig1_nonplanar(double p0, double p1, double p2);

}  // namespace treepca::testing
