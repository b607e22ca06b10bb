#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treepca/locus.hpp"
#include "treepca/moves.hpp"

namespace treepca {

// Rooted tree on leaves 1..n_taxa from the Kingman coalescent: with k
// lineages the waiting time is Exponential(k(k-1)/2) and a uniform pair
// merges. Leaf 0 is attached at the root, so the result has N = n_taxa.
PhyloTree kingman_tree(int n_taxa, std::mt19937_64& rng);
PhyloTree kingman_tree(int n_taxa, std::uint64_t seed);

// One gene lineage per species under the multispecies coalescent: within a
// species branch k lineages coalesce at rate k(k-1)/(2 theta); lineages left
// at the species root keep coalescing above it. The species tree is read as
// rooted at leaf 0's attachment point with branch durations equal to its
// edge lengths (absent pendants have duration 0).
PhyloTree constrained_gene_tree(const PhyloTree& species, std::mt19937_64& rng, double theta = 1.0);

enum class TopologyMove { nni, spr };

TopologyMove parse_topology_move(const std::string& text);
std::string to_string(TopologyMove move);

enum class Dispersion { none, low, high };

Dispersion parse_dispersion(const std::string& text);
std::string to_string(Dispersion dispersion);

struct SurfaceDatasetSpec {
  int n_taxa = 10;
  int n_points = 100;
  TopologyMove topo_op = TopologyMove::nni;
  int op_count = 2;
  double gamma_shape = 2.0;
  double gamma_rate = 20.0;
  std::vector<double> dirichlet_alpha{4.0, 4.0, 4.0};
  Dispersion dispersion = Dispersion::low;
  int walk_steps = 10;
  // Walk step size as a fraction of ||w0|| for each dispersion class.
  double low_step = 0.02;
  double high_step = 0.08;
  int truth_resolution = 50;
  std::uint64_t seed = 1;
  int threads = 0;

  double step_fraction() const;
};

struct SurfaceDataset {
  VertexSet vertices;
  std::vector<std::vector<double>> weights;  // Dirichlet draws
  std::vector<PhyloTree> surface_points;     // mu(W, p_i) before dispersal
  std::vector<PhyloTree> data;
  FitStatistics truth;  // exhaustive projection of the data onto Pi(W)
};

SurfaceDataset make_surface_dataset(const SurfaceDatasetSpec& spec);

// u, v0, v1, v2, z: a Kingman species tree and four gene trees inside it.
struct Quadruple {
  PhyloTree species;
  std::vector<PhyloTree> vertices;
  PhyloTree test;
};

Quadruple make_quadruple(int n_taxa, std::uint64_t seed, double theta = 1.0);

}  // namespace treepca
