#pragma once

#include <string>
#include <vector>

#include "treepca/locus.hpp"

namespace treepca {

inline constexpr int kPlotWidth = 600;
inline constexpr int kPlotHeight = 520;

// Ternary diagram of a k = 2 topology map: one filled path per connected
// region (outline of its lattice cells), optional dots at the given weight
// vectors, and a legend of topologies. Deterministic output.
std::string simplex_svg(const TopologyMap& map, const LeafSet& leaves, const std::vector<std::vector<double>>& dots = {});

// p0,p1,p2,topology,region per lattice point.
std::string lattice_csv(const TopologyMap& map, const LeafSet& leaves);

}  // namespace treepca
