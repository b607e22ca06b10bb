#include "treepca/refine.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "treepca/geodesic.hpp"
#include "treepca/topology.hpp"

namespace treepca {

namespace {

// Pendants are common to every tree, so their optimal lengths are the
// weighted averages whatever the internal edges do.
std::vector<Edge> mean_pendants(const WeightedSample& sample, PendantMode mode) {
  std::vector<Edge> out;
  if (mode == PendantMode::ignore) return out;
  const int n = sample.trees()[0].n();
  for (int leaf = 1; leaf <= n; ++leaf) {
    const Split s(std::uint64_t{1} << leaf);
    double l = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) l += sample.weights()[i] * sample.trees()[i].length(s);
    out.push_back({s, l});
  }
  return out;
}

class OrthantProblem {
 public:
  OrthantProblem(const WeightedSample& sample, std::vector<Split> splits, const std::vector<Edge>& pendants, PendantMode mode)
      : sample_(sample), splits_(std::move(splits)), pendants_(pendants), mode_(mode) {}

  std::size_t size() const { return splits_.size(); }

  PhyloTree tree(const std::vector<double>& x) const {
    std::vector<Edge> edges = pendants_;
    for (std::size_t k = 0; k < splits_.size(); ++k) {
      if (x[k] > 0.0) edges.push_back({splits_[k], x[k]});
    }
    return PhyloTree::from_trusted(sample_.trees()[0].leaves(), std::move(edges));
  }

  double value(const std::vector<double>& x) const { return frechet_objective(tree(x), sample_, mode_); }

  OrthantDerivatives derivatives(const std::vector<double>& x) const {
    const std::size_t m = splits_.size();
    OrthantDerivatives d;
    d.value = value(x);
    d.gradient.assign(m, 0.0);
    d.hessian.assign(m * m, 0.0);
    // Lift zero lengths slightly so the support seen is the one just
    // inside the orthant.
    double scale = 1.0;
    for (double v : x) scale += v * v;
    const double lift = 1e-10 * std::sqrt(scale);
    std::vector<double> lifted = x;
    for (double& v : lifted) v = std::max(v, lift);
    const PhyloTree at = tree(lifted);
    auto index = [&](Split s) -> std::ptrdiff_t {
      auto it = std::lower_bound(splits_.begin(), splits_.end(), s);
      return (it != splits_.end() && *it == s) ? it - splits_.begin() : -1;
    };
    for (std::size_t i = 0; i < sample_.size(); ++i) {
      const double w = sample_.weights()[i];
      if (w == 0.0) continue;
      const auto support = compute_support(at, sample_.trees()[i], mode_);
      for (const auto& c : support.common) {
        const auto k = index(c.split);
        if (k < 0) continue;
        const auto kk = static_cast<std::size_t>(k);
        d.gradient[kk] += 2.0 * w * (c.source_length - c.target_length);
        d.hessian[kk * m + kk] += 2.0 * w;
      }
      for (const auto& leg : support.legs) {
        const double a = leg.a_norm, b = leg.b_norm;
        for (const auto& e : leg.a) {
          const auto k = index(e.split);
          if (k < 0) continue;
          const auto kk = static_cast<std::size_t>(k);
          d.gradient[kk] += 2.0 * w * (a + b) * e.length / a;
          for (const auto& f : leg.a) {
            const auto j = index(f.split);
            if (j < 0) continue;
            const auto jj = static_cast<std::size_t>(j);
            double h = -b * e.length * f.length / (a * a * a);
            if (jj == kk) h += (a + b) / a;
            d.hessian[kk * m + jj] += 2.0 * w * h;
          }
        }
      }
    }
    return d;
  }

  // Projected Newton on the closed orthant from x. Coordinates near zero
  // whose gradient pushes outwards are treated as bound and take a plain
  // projected gradient step, so they reach zero instead of lingering.
  // With `interior`, x must be positive and every step stops short of the
  // boundary; coordinates heading for zero shrink geometrically and are
  // cleared at the end. This avoids evaluating derivatives where a block
  // of splits vanishes together, where the objective is not smooth.
  double minimise(std::vector<double>& x, int max_steps, bool interior = false) const {
    if (interior) return minimise_interior(x, max_steps);
    const std::size_t m = splits_.size();
    double fx = value(x);
    if (m == 0) return fx;
    for (int step = 0; step < max_steps; ++step) {
      const auto d = derivatives(x);
      double xnorm = 0.0, residual = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        xnorm += x[k] * x[k];
        const double r = x[k] - std::max(0.0, x[k] - d.gradient[k]);
        residual += r * r;
      }
      residual = std::sqrt(residual);
      if (residual <= 1e-13 * (1.0 + fx)) break;
      const double active_tol = std::min(1e-6 * (1.0 + std::sqrt(xnorm)), residual);
      std::vector<std::size_t> free, bound;
      for (std::size_t k = 0; k < m; ++k) {
        if (x[k] <= active_tol && d.gradient[k] > 0.0) {
          bound.push_back(k);
        } else {
          free.push_back(k);
        }
      }
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::VectorXd dir(nf);
      if (nf > 0) {
        Eigen::MatrixXd h(nf, nf);
        Eigen::VectorXd g(nf);
        for (Eigen::Index r = 0; r < nf; ++r) {
          g(r) = d.gradient[free[static_cast<std::size_t>(r)]];
          for (Eigen::Index c = 0; c < nf; ++c) h(r, c) = d.hessian[free[static_cast<std::size_t>(r)] * m + free[static_cast<std::size_t>(c)]];
        }
        h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
        dir = h.ldlt().solve(-g);
        if (!dir.allFinite() || dir.dot(g) >= 0.0) dir = -g;
      }

      bool moved = false;
      double alpha = 1.0;
      std::vector<double> y = x;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        y = x;
        for (Eigen::Index r = 0; r < nf; ++r) {
          auto k = free[static_cast<std::size_t>(r)];
          y[k] = std::max(0.0, x[k] + alpha * dir(r));
        }
        for (auto k : bound) y[k] = std::max(0.0, x[k] - alpha * d.gradient[k]);
        const double fy = value(y);
        if (fy < fx) {
          double change = 0.0;
          for (std::size_t k = 0; k < m; ++k) change = std::max(change, std::abs(y[k] - x[k]));
          x = y;
          const double gain = fx - fy;
          fx = fy;
          moved = change > 1e-15 * (1.0 + std::sqrt(xnorm)) && gain > 1e-16 * (1.0 + fx);
          break;
        }
      }
      if (!moved) break;
    }
    return fx;
  }

  // Newton in log-lengths. Near a face where a block of splits vanishes the
  // objective behaves like a cone; in log coordinates both the direction
  // within the block and the distance to the face move at comparable rates.
  double minimise_interior(std::vector<double>& x, int max_steps) const {
    const std::size_t m = splits_.size();
    double fx = value(x);
    if (m == 0) return fx;
    double xnorm = 0.0;
    for (double v : x) xnorm += v * v;
    const double negligible = 1e-11 * (1.0 + std::sqrt(xnorm));
    const auto n = static_cast<Eigen::Index>(m);
    for (int step = 0; step < max_steps; ++step) {
      const auto d = derivatives(x);
      Eigen::VectorXd g(n);
      Eigen::MatrixXd h(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto rr = static_cast<std::size_t>(r);
        g(r) = x[rr] * d.gradient[rr];
        for (Eigen::Index c = 0; c < n; ++c) h(r, c) = x[rr] * d.hessian[rr * m + static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        h(r, r) += g(r);
      }
      if (g.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + fx)) break;
      // The log-coordinate Hessian need not be definite; flip and floor its
      // eigenvalues to keep a scaled descent direction.
      Eigen::VectorXd dir = -g;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
      if (eig.info() == Eigen::Success) {
        Eigen::VectorXd lambda = eig.eigenvalues().cwiseAbs();
        const double floor = 1e-10 * (1.0 + lambda.maxCoeff());
        for (Eigen::Index r = 0; r < n; ++r) lambda(r) = std::max(lambda(r), floor);
        dir = eig.eigenvectors() * (eig.eigenvectors().transpose() * -g).cwiseQuotient(lambda);
      }
      if (!dir.allFinite() || dir.dot(g) >= 0.0) dir = -g;
      double alpha = std::min(1.0, 3.0 / dir.cwiseAbs().maxCoeff());
      bool moved = false;
      std::vector<double> y(m);
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        for (std::size_t k = 0; k < m; ++k) y[k] = x[k] * std::exp(alpha * dir(static_cast<Eigen::Index>(k)));
        const double fy = value(y);
        if (fy < fx) {
          const double gain = fx - fy;
          x = y;
          fx = fy;
          moved = gain > 1e-15 * (1.0 + fx);
          break;
        }
      }
      if (!moved) break;
      // Lengths that have collapsed are set to zero once that costs nothing.
      bool any = false;
      y = x;
      for (double& v : y) {
        if (v < negligible) {
          v = 0.0;
          any = true;
        }
      }
      if (any) {
        const double fy = value(y);
        if (fy <= fx + 1e-15 * (1.0 + fx)) {
          fx = std::min(fx, fy);
          x = y;
          return minimise(x, max_steps - step - 1);
        }
      }
    }
    return fx;
  }

 private:
  const WeightedSample& sample_;
  std::vector<Split> splits_;
  std::vector<Edge> pendants_;
  PendantMode mode_;
};

std::vector<double> lengths_in(const PhyloTree& t, const std::vector<Split>& splits) {
  std::vector<double> x;
  x.reserve(splits.size());
  for (Split s : splits) x.push_back(t.length(s));
  return x;
}

// Lengths this small relative to the tree are rounding residue of the
// orthant solver; keeping them would hide the neighbouring orthants.
PhyloTree without_negligible(const PhyloTree& t) {
  const double tol = 1e-10 * (1.0 + norm(t, PendantMode::include));
  std::vector<Edge> kept;
  for (const auto& e : t.edges()) {
    if (e.split.is_pendant() || e.length > tol) kept.push_back(e);
  }
  if (kept.size() == t.edges().size()) return t;
  return PhyloTree::from_trusted(t.leaves(), std::move(kept));
}

}  // namespace

OrthantDerivatives orthant_derivatives(const WeightedSample& sample, const std::vector<Split>& splits,
                                       const std::vector<double>& lengths, PendantMode mode) {
  std::vector<std::size_t> order(splits.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return splits[a] < splits[b]; });
  std::vector<Split> sorted;
  std::vector<double> x;
  for (auto k : order) {
    sorted.push_back(splits[k]);
    x.push_back(lengths[k]);
  }
  const OrthantProblem problem(sample, sorted, mean_pendants(sample, mode), mode);
  const auto d = problem.derivatives(x);
  // Back to the caller's order.
  const std::size_t m = splits.size();
  OrthantDerivatives out;
  out.value = d.value;
  out.gradient.assign(m, 0.0);
  out.hessian.assign(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    out.gradient[order[r]] = d.gradient[r];
    for (std::size_t c = 0; c < m; ++c) out.hessian[order[r] * m + order[c]] = d.hessian[r * m + c];
  }
  return out;
}

RefineResult refine_mean(const WeightedSample& input, const PhyloTree& start, const RefineOptions& options) {
  const WeightedSample sample = input.without_zero_weights();
  const PendantMode mode = options.pendant;
  const auto pendants = mean_pendants(sample, mode);
  const auto& leaves = *sample.trees()[0].leaves();

  RefineResult result;
  std::vector<Edge> start_edges = pendants;
  for (const auto& e : start.internal_edges()) start_edges.push_back(e);
  result.mean = PhyloTree::from_trusted(sample.trees()[0].leaves(), std::move(start_edges));
  result.objective = frechet_objective(result.mean, sample, mode);

  std::vector<Split> sample_splits;
  for (const auto& t : sample.trees()) {
    for (const auto& e : t.internal_edges()) sample_splits.push_back(e.split);
  }
  std::sort(sample_splits.begin(), sample_splits.end());
  sample_splits.erase(std::unique(sample_splits.begin(), sample_splits.end()), sample_splits.end());

  for (int hop = 0; hop <= options.max_hops; ++hop) {
    result.mean = without_negligible(result.mean);
    result.objective = frechet_objective(result.mean, sample, mode);
    const auto current = result.mean.topology().splits();
    // A split absent from every sample tree has a positive derivative
    // wherever it is present, so the mean uses sample splits only.
    std::vector<Split> pool;
    for (Split s : sample_splits) {
      if (std::binary_search(current.begin(), current.end(), s)) continue;
      if (std::all_of(current.begin(), current.end(), [&](Split c) { return compatible(s, c); })) pool.push_back(s);
    }
    const auto candidates = compatible_extensions(current, pool, static_cast<std::size_t>(options.max_orthants));
    if (!candidates) {
      result.certified = false;
      return result;
    }
    // First pass starts each neighbouring orthant at the current point. The
    // objective is not differentiable there when several new splits appear
    // together, so a second pass starts slightly inside each orthant before
    // the point is accepted.
    bool improved = false;
    for (int pass = 0; pass < 2 && !improved; ++pass) {
      const double inset = pass == 0 ? 0.0 : 1e-3 * (1.0 + norm(result.mean, PendantMode::ignore));
      for (const auto& orthant : *candidates) {
        const OrthantProblem problem(sample, orthant, pendants, mode);
        auto x = lengths_in(result.mean, orthant);
        bool fresh = false;
        for (double& v : x) {
          if (v == 0.0) {
            v = inset;
            fresh = true;
          }
        }
        if (pass == 1 && !fresh) continue;
        const double f = problem.minimise(x, options.max_newton, pass == 1);
        if (f < result.objective - 1e-13 * (1.0 + result.objective)) {
          result.mean = problem.tree(x);
          result.objective = f;
          improved = true;
          result.hops = hop + 1;
          break;
        }
      }
    }
    if (!improved) {
      result.certified = true;
      return result;
    }
  }
  result.mean = without_negligible(result.mean);
  result.objective = frechet_objective(result.mean, sample, mode);
  return result;
}

}  // namespace treepca
