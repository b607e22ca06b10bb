#include "fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace treepca::testing {

Fig1::Fig1() : leaves(LeafSet::numbered(5)) {
  s23 = Split::from_indices({2, 3}, *leaves);
  s45 = Split::from_indices({4, 5}, *leaves);
  s01 = Split::from_indices({0, 1}, *leaves);
  s345 = Split::from_indices({3, 4, 5}, *leaves);
  s234 = Split::from_indices({2, 3, 4}, *leaves);
  v0 = at(1, 1, 2);
  v1 = at(-2, 1, 1);
  v2 = at(1, -2, 1);
}

PhyloTree Fig1::at(double xi1, double xi2, double xi3) const {
  if (xi1 < 0 && xi2 < 0) throw std::invalid_argument("no tree in the (-,-) orthant");
  std::vector<Edge> edges;
  if (xi1 > 0) edges.push_back({s23, xi1});
  if (xi1 < 0) edges.push_back({s345, -xi1});
  if (xi2 > 0) edges.push_back({s45, xi2});
  if (xi2 < 0) edges.push_back({s234, -xi2});
  if (xi3 > 0) edges.push_back({s01, xi3});
  return PhyloTree::validated(leaves, std::move(edges));
}

std::array<double, 3> Fig1::coordinates(const PhyloTree& tree) const {
  std::array<double, 3> xi{0, 0, 0};
  for (const auto& e : tree.edges()) {
    if (e.split == s23) xi[0] = e.length;
    else if (e.split == s345) xi[0] = -e.length;
    else if (e.split == s45) xi[1] = e.length;
    else if (e.split == s234) xi[1] = -e.length;
    else if (e.split == s01) xi[2] = e.length;
    else throw std::invalid_argument("tree uses a split outside the configuration: " + e.split.to_string());
  }
  return xi;
}

const Fig1& fig1() {
  static const Fig1 instance;
  return instance;
}

std::array<double, 3> fig1_planar(double p0, double p1, double p2) {
  return {p0 - 2 * p1 + p2, p0 + p1 - 2 * p2, 1 + p0};
}

std::array<double, 3> fig1_nonplanar(double p0, double p1, double p2) {
  const double f = (p0 + p1) / (p0 - 2 * p1);
  const double r5 = std::sqrt(5.0);
  return {p0 - 2 * p1 + p2 * r5 / std::sqrt(1 + f * f), p0 + p1 - p2 * r5 / std::sqrt(1 + 1 / (f * f)), p0 + 1};
}

}  // namespace treepca::testing
