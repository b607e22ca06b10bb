#pragma once

#include <vector>

#include "treepca/frechet.hpp"

namespace treepca {

// Exact Frechet mean by convex minimisation over closed orthants. Inside a
// fixed orthant the objective is a smooth convex function of the internal
// edge lengths wherever the geodesic supports are constant, so projected
// Newton converges quickly; a minimiser on the orthant boundary is then
// compared against every orthant meeting that face, moving on while the
// objective drops.
struct RefineOptions {
  PendantMode pendant = PendantMode::ignore;
  int max_hops = 30;
  int max_newton = 60;
  // Faces touching more orthants than this are not searched exhaustively.
  std::size_t max_orthants = 105;
};

struct RefineResult {
  PhyloTree mean;
  double objective = 0.0;
  int hops = 0;
  // Every orthant around the result was checked.
  bool certified = false;
};

RefineResult refine_mean(const WeightedSample& sample, const PhyloTree& start, const RefineOptions& options = {});

// Gradient and Hessian of the objective with respect to the lengths of
// `splits` (internal splits forming a compatible set), at the tree with
// those lengths. Zero lengths give one-sided derivatives into the orthant.
struct OrthantDerivatives {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;  // row-major, splits.size()^2
};

OrthantDerivatives orthant_derivatives(const WeightedSample& sample, const std::vector<Split>& splits,
                                       const std::vector<double>& lengths, PendantMode mode = PendantMode::ignore);

}  // namespace treepca
