#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treepca/locus.hpp"

namespace treepca {

enum class KernelKind { data_resample, beta_blend, random_walk };

// A proposal for replacing one vertex during the search.
struct ProposalKernel {
  KernelKind kind = KernelKind::data_resample;
  double alpha = 2.0;  // beta_blend
  double beta = 2.0;
  int steps = 1;  // random_walk
  double step_size = 0.05;

  static ProposalKernel data_resample();
  static ProposalKernel beta_blend(double alpha, double beta);
  static ProposalKernel random_walk(int steps, double step_size);

  // Throws ParameterOutOfRange.
  void validate() const;
  std::string to_string() const;
};

// data_resample: uniform draw from `data`. beta_blend: the point a
// Beta(alpha, beta) proportion along the geodesic from x to a uniform draw.
// random_walk: `steps` steps of the edge-length walk from x.
// Throws EmptyData for the first two kinds when `data` is empty.
PhyloTree propose(const ProposalKernel& kernel, const PhyloTree& x, const std::vector<PhyloTree>& data, std::mt19937_64& rng);

// data_resample, beta_blend(2,2), random_walk(1, 0.05 scale), random_walk(5, 0.02 scale).
std::vector<ProposalKernel> default_kernels(double scale);

struct FitOptions {
  int order = 2;
  std::vector<ProposalKernel> kernels;  // empty selects default_kernels(data_scale(data))
  int restarts = 3;
  int conv_window = 20;
  double conv_threshold = 1e-3;
  int max_sweeps = 500;
  std::uint64_t seed = 0;
  // Objective during the search and for the reported statistics. A search
  // eps <= 0 selects search_eps_scale * data_scale(data), fixed for the run.
  ProjectorConfig search{ProjectorMethod::geometric, GeometricOptions{0.0, 10, 1}};
  double search_eps_scale = 1e-2;
  ProjectorConfig report{ProjectorMethod::geometric, GeometricOptions{0.0, 10, 3}};
  PendantMode pendant = PendantMode::ignore;
  int threads = 0;
};

struct TracePoint {
  int sweep = 0;
  double sum_sq = 0.0;
};

struct FittedComponent {
  int order = 0;
  VertexSet vertices;
  FitStatistics stats;
  std::vector<TracePoint> trace;  // search objective after each sweep of the winning restart
  std::uint64_t seed = 0;
  int best_restart = 0;
  std::vector<double> restart_sum_sq;  // reported D^2 of every restart
};

// Greedy stochastic search: each sweep proposes, for every vertex and every
// kernel in turn, a replacement vertex and keeps it when the search D^2
// drops. Stops when D^2 improved by less than conv_threshold (relative) over
// the last conv_window sweeps. Best of `restarts` under the report projector.
// Throws InsufficientData (|data| < order + 1), EmptyData, ParameterOutOfRange.
FittedComponent fit_component(const std::vector<PhyloTree>& data, const FitOptions& options = {});

// fit_component with order 1.
FittedComponent fit_principal_geodesic(const std::vector<PhyloTree>& data, FitOptions options = {});

}  // namespace treepca
