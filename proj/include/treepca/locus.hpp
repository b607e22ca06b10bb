#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treepca/frechet.hpp"
#include "treepca/refine.hpp"

namespace treepca {

// k+1 >= 2 trees over one leaf set.
class VertexSet {
 public:
  // Throws InsufficientData (fewer than 2 trees) and LeafSetMismatch.
  explicit VertexSet(std::vector<PhyloTree> vertices);

  const std::vector<PhyloTree>& vertices() const { return vertices_; }
  const PhyloTree& operator[](std::size_t i) const { return vertices_[i]; }
  std::size_t size() const { return vertices_.size(); }
  int order() const { return static_cast<int>(vertices_.size()) - 1; }
  const LeafSetPtr& leaves() const { return vertices_[0].leaves(); }

 private:
  std::vector<PhyloTree> vertices_;
};

// Probability vector in the k-simplex.
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws ParameterOutOfRange for negative entries or a sum away from 1.
  explicit SimplexPoint(std::vector<double> p);
  static SimplexPoint vertex(std::size_t size, std::size_t index);

  const std::vector<double>& weights() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

enum class MeanMethod { cyclic, sturm, refined };

MeanMethod parse_mean_method(const std::string& text);
std::string to_string(MeanMethod method);

struct SurfaceOptions {
  MeanMethod method = MeanMethod::cyclic;
  MeanOptions mean;  // iteration settings; `refined` uses them for its starting point
  std::uint64_t seed = 0;  // for sturm
};

// mu(V, p). Weight vectors supported on one or two vertices are evaluated
// exactly (a vertex, or the point on the edge geodesic).
PhyloTree surface_point(const VertexSet& vertices, const SimplexPoint& p, const SurfaceOptions& options = {});

// `refined` starting from a nearby tree instead of a fresh iteration.
PhyloTree surface_point_from(const VertexSet& vertices, const SimplexPoint& p, const PhyloTree& start, PendantMode mode);

struct ProjectionResult {
  PhyloTree projected;
  std::vector<double> weights;
  double distance = 0.0;
  long iterations = 0;
  int restarts_used = 0;
  bool converged = true;
  // Lattice points within eps of the minimum distance (exhaustive only).
  int tie_count = 1;
};

// Surface points on the triangular lattice {(a, b, c)/r : a + b + c = r},
// in lexicographic order of (a, b, c). For k = 1 the lattice is {(a, r-a)/r}.
struct SurfaceLattice {
  int resolution = 0;
  std::vector<std::vector<double>> weights;
  std::vector<PhyloTree> points;
};

struct LatticeOptions {
  int resolution = 50;
  PendantMode pendant = PendantMode::ignore;
  int threads = 0;
};

// Throws UnsupportedOrder for k > 2.
SurfaceLattice surface_lattice(const VertexSet& vertices, const LatticeOptions& options = {});

// Nearest lattice point; ties go to the lexicographically smallest p.
// `tie_eps` <= 0 selects 1e-9 * (1 + minimum distance).
ProjectionResult exhaustive_project(const PhyloTree& z, const SurfaceLattice& lattice, PendantMode mode = PendantMode::ignore,
                                    double tie_eps = 0.0);
ProjectionResult exhaustive_project(const PhyloTree& z, const VertexSet& vertices, const LatticeOptions& options = {});

struct GeometricOptions {
  double eps = 0.0;  // <= 0 selects 1e-3 * data_scale(vertices)
  int window = 10;
  int restarts = 3;
  long max_iter = 100000;
  PendantMode pendant = PendantMode::ignore;
};

// Greedy Sturm-type iteration: from a random perimeter point, repeatedly
// step 1/(i+2) towards whichever vertex brings the iterate closest to z.
// Best of `restarts` runs.
ProjectionResult geometric_project(const PhyloTree& z, const VertexSet& vertices, std::uint64_t seed,
                                   const GeometricOptions& options = {});

double default_projection_eps(const VertexSet& vertices, PendantMode mode);

enum class ProjectorMethod { geometric, exhaustive };

ProjectorMethod parse_projector_method(const std::string& text);
std::string to_string(ProjectorMethod method);

struct ProjectorConfig {
  ProjectorMethod method = ProjectorMethod::geometric;
  GeometricOptions geometric;
  int resolution = 50;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct FitStatistics {
  double sum_sq_projected = 0.0;  // D^2
  double r_squared = 0.0;
  std::vector<ProjectionResult> per_datum;
  PhyloTree mean_of_projections;
};

// Projects every datum (concurrently; datum i uses stream i of the seed).
std::vector<ProjectionResult> project_all(const std::vector<PhyloTree>& data, const VertexSet& vertices,
                                          const ProjectorConfig& config);

// r^2 = S / (D^2 + S) with S the spread of the projections about their mean.
FitStatistics fit_statistics(const std::vector<PhyloTree>& data, std::vector<ProjectionResult> projections,
                             PendantMode mode = PendantMode::ignore);

FitStatistics sum_sq_projected(const std::vector<PhyloTree>& data, const VertexSet& vertices, const ProjectorConfig& config = {});

struct TopologyCell {
  std::vector<double> weights;
  TopologyId topology;
  int region = 0;  // connected component of equal topology on the lattice
};

struct TopologyMap {
  int resolution = 0;
  std::vector<TopologyCell> cells;  // lattice order
  int region_count = 0;
  std::vector<TopologyId> topologies;  // distinct topologies, first-seen order
};

// k = 2 only (UnsupportedOrder otherwise).
TopologyMap simplex_topology_map(const VertexSet& vertices, const LatticeOptions& options = {});
TopologyMap simplex_topology_map(const SurfaceLattice& lattice);

}  // namespace treepca
