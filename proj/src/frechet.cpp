#include "treepca/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treepca/errors.hpp"
#include "treepca/geodesic.hpp"

namespace treepca {

WeightedSample::WeightedSample(std::vector<PhyloTree> trees, std::vector<double> weights) : trees_(std::move(trees)) {
  if (trees_.empty()) throw EmptySample("weighted sample has no trees");
  if (weights.empty()) weights.assign(trees_.size(), 1.0);
  if (weights.size() != trees_.size()) {
    throw ParameterOutOfRange("got " + std::to_string(weights.size()) + " weights for " + std::to_string(trees_.size()) + " trees");
  }
  for (std::size_t i = 1; i < trees_.size(); ++i) {
    if (!same_leaves(trees_[0].leaves(), trees_[i].leaves())) throw LeafSetMismatch("sample trees use different leaf sets");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterOutOfRange("weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ParameterOutOfRange("weights must not all be zero");
  for (double& w : weights) w /= total;
  weights_ = std::move(weights);
}

WeightedSample WeightedSample::without_zero_weights() const {
  WeightedSample out;
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    if (weights_[i] > 0.0) {
      out.trees_.push_back(trees_[i]);
      out.weights_.push_back(weights_[i]);
    }
  }
  return out;
}

double data_scale(const std::vector<PhyloTree>& trees, PendantMode mode) {
  const std::size_t m = std::min<std::size_t>(trees.size(), 64);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      sum += distance(trees[i], trees[j], mode);
      ++pairs;
    }
  }
  if (pairs > 0 && sum > 0.0) return sum / static_cast<double>(pairs);
  double norms = 0.0;
  for (std::size_t i = 0; i < m; ++i) norms += norm(trees[i], mode);
  if (m > 0 && norms > 0.0) return norms / static_cast<double>(m);
  return 1.0;
}

double frechet_objective(const PhyloTree& y, const WeightedSample& sample, PendantMode mode) {
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.weights()[i] == 0.0) continue;
    const double d = distance(y, sample.trees()[i], mode);
    sum += sample.weights()[i] * d * d;
  }
  return sum;
}

// ---------------------------------------------------------------------------

ConvergenceMonitor::ConvergenceMonitor(double eps, int window, PendantMode mode) : eps_(eps), window_(window), mode_(mode) {
  if (!(eps > 0.0)) throw ParameterOutOfRange("convergence eps must be positive");
  if (window < 2) throw ParameterOutOfRange("convergence window must be at least 2");
}

bool ConvergenceMonitor::push(const PhyloTree& iterate, double step) {
  const long index = count_++;
  const double path = recent_.empty() ? 0.0 : recent_.back().path + step;
  // Newest first: the first violation found is the latest one for this iterate.
  for (auto it = recent_.rbegin(); it != recent_.rend(); ++it) {
    if (it->index <= last_violation_) break;
    if (path - it->path < eps_) continue;
    if (distance(it->tree, iterate, mode_) >= eps_) {
      last_violation_ = it->index;
      break;
    }
  }
  recent_.push_back({index, iterate, path});
  while (static_cast<int>(recent_.size()) > window_) recent_.pop_front();
  return index - last_violation_ >= window_;
}

// ---------------------------------------------------------------------------

namespace {

class WeightedDraws {
 public:
  WeightedDraws(const std::vector<double>& weights, SamplingScheme scheme, std::uint64_t seed)
      : weights_(weights), scheme_(scheme), rng_(seed) {
    cdf_.resize(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
    cdf_.back() = 1.0;
  }

  std::size_t next() {
    if (scheme_ == SamplingScheme::iid) return lookup(uniform_(rng_));
    if (phase_ < 0.0) phase_ = uniform_(rng_);
    if (pos_ == block_.size()) refill();
    return block_[pos_++];
  }

 private:
  std::size_t lookup(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

  // A rotation by the golden ratio from a uniform start gives every draw
  // marginal distribution `weights` while keeping the counts within
  // O(log i) of their expectations; shuffling each block of n draws breaks
  // up the deterministic visiting order.
  void refill() {
    const std::size_t m = weights_.size();
    block_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      phase_ += kGoldenFraction;
      if (phase_ >= 1.0) phase_ -= 1.0;
      block_[k] = lookup(phase_);
    }
    std::shuffle(block_.begin(), block_.end(), rng_);
    pos_ = 0;
  }

  static constexpr double kGoldenFraction = 0.6180339887498949;

  std::vector<double> weights_;
  std::vector<double> cdf_;
  SamplingScheme scheme_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<std::size_t> block_;
  std::size_t pos_ = 0;
  double phase_ = -1.0;
};

MeanResult finish(PhyloTree mean, const WeightedSample& sample, long iterations, bool converged, PendantMode mode) {
  MeanResult result;
  result.objective = frechet_objective(mean, sample, mode);
  result.mean = std::move(mean);
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

double resolve_eps(const WeightedSample& sample, const MeanOptions& options) {
  return options.eps > 0.0 ? options.eps : 1e-4 * data_scale(sample.trees(), options.pendant);
}

}  // namespace

MeanResult sturm_mean(const WeightedSample& input, std::uint64_t seed, const MeanOptions& options) {
  const WeightedSample sample = input.without_zero_weights();
  const PendantMode mode = options.pendant;
  if (sample.size() == 1) return finish(sample.trees()[0].restricted(mode), sample, 1, true, mode);

  WeightedDraws draws(sample.weights(), options.sampling, seed);
  ConvergenceMonitor monitor(resolve_eps(sample, options), options.window, mode);
  PhyloTree current = sample.trees()[draws.next()].restricted(mode);
  monitor.push(current, 0.0);
  for (long i = 0; i < options.max_iter; ++i) {
    const Geodesic g(current, sample.trees()[draws.next()], mode);
    const double s = 1.0 / static_cast<double>(i + 2);
    current = g.at(s);
    if (monitor.push(current, s * g.length())) return finish(std::move(current), sample, i + 1, true, mode);
  }
  return finish(std::move(current), sample, options.max_iter, false, mode);
}

MeanResult cyclic_mean(const WeightedSample& input, const MeanOptions& options) {
  const WeightedSample sample = input.without_zero_weights();
  const PendantMode mode = options.pendant;
  if (sample.size() == 1) return finish(sample.trees()[0].restricted(mode), sample, 1, true, mode);

  const auto n = static_cast<long>(sample.size());
  ConvergenceMonitor monitor(resolve_eps(sample, options), options.window, mode);
  PhyloTree current = sample.trees()[0].restricted(mode);
  monitor.push(current, 0.0);
  for (long i = 0; i < options.max_iter; ++i) {
    const auto j = static_cast<std::size_t>(i % n);
    const long cycle = i / n;
    const double t = std::min(1.0, static_cast<double>(n) * sample.weights()[j] / static_cast<double>(cycle + 2));
    const Geodesic g(current, sample.trees()[j], mode);
    current = g.at(t);
    if (monitor.push(current, t * g.length())) return finish(std::move(current), sample, i + 1, true, mode);
  }
  return finish(std::move(current), sample, options.max_iter, false, mode);
}

}  // namespace treepca
