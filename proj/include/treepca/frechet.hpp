#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "treepca/tree.hpp"

namespace treepca {

// Trees over a shared leaf set with nonnegative weights normalised to sum 1.
class WeightedSample {
 public:
  // Empty `weights` means equal weights. Throws EmptySample,
  // LeafSetMismatch, ParameterOutOfRange (negative / all-zero weights).
  explicit WeightedSample(std::vector<PhyloTree> trees, std::vector<double> weights = {});

  const std::vector<PhyloTree>& trees() const { return trees_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return trees_.size(); }

  // Copy without zero-weight entries.
  WeightedSample without_zero_weights() const;

 private:
  WeightedSample() = default;
  std::vector<PhyloTree> trees_;
  std::vector<double> weights_;
};

// How Sturm's algorithm draws data points. Both give P(Z_i = z_j) = w_j for
// every draw; `stratified` follows a low-discrepancy sequence so the draw
// counts track the weights closely, which removes most of the sampling noise.
enum class SamplingScheme { iid, stratified };

struct MeanOptions {
  double eps = 0.0;  // <= 0 selects 1e-4 * data_scale(sample)
  int window = 10;
  long max_iter = 100000;
  PendantMode pendant = PendantMode::ignore;
  SamplingScheme sampling = SamplingScheme::stratified;
};

struct MeanResult {
  PhyloTree mean;
  double objective = 0.0;  // sum_i w_i d(mean, z_i)^2
  long iterations = 0;
  bool converged = false;
};

// Mean pairwise distance over (at most the first 64) trees; falls back to
// the mean norm, then to 1, for degenerate inputs.
double data_scale(const std::vector<PhyloTree>& trees, PendantMode mode = PendantMode::ignore);

double frechet_objective(const PhyloTree& y, const WeightedSample& sample, PendantMode mode = PendantMode::ignore);

// mu_{i+1} is the point a proportion 1/(i+2) along the geodesic from mu_i
// to a weight-sampled data point.
MeanResult sturm_mean(const WeightedSample& sample, std::uint64_t seed, const MeanOptions& options = {});

// Deterministic variant: data points are visited cyclically and step i
// moves a proportion min(1, n w_j / (cycle + 2)) towards point j.
MeanResult cyclic_mean(const WeightedSample& sample, const MeanOptions& options = {});

// Stops an iteration once the last `window` iterates pairwise lie within
// `eps`. Pairs whose path length along the iterates is already below eps
// are certified without a distance computation.
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(double eps, int window, PendantMode mode);

  // Adds the next iterate; `step` is its distance from the previous one.
  // Returns true when converged.
  bool push(const PhyloTree& iterate, double step);
  long count() const { return count_; }

 private:
  struct Entry {
    long index;
    PhyloTree tree;
    double path;  // cumulative step length up to this iterate
  };
  double eps_;
  int window_;
  PendantMode mode_;
  std::deque<Entry> recent_;
  long count_ = 0;
  long last_violation_ = -1;
};

}  // namespace treepca
