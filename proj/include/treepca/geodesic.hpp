#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "treepca/tree.hpp"

namespace treepca {

// A split carried along the whole geodesic, with its length at each end
// (0 when absent from that tree).
struct CommonEdge {
  Split split;
  double source_length = 0.0;
  double target_length = 0.0;
};

// One pair (A^(j), B^(j)): splits of the source that shrink to zero during
// leg j, and splits of the target that grow from zero after them.
struct SupportLeg {
  std::vector<Edge> a;
  std::vector<Edge> b;
  double a_norm = 0.0;
  double b_norm = 0.0;

  double ratio() const { return a_norm / b_norm; }
};

// Ordered (A, B, C) decomposition of a geodesic.
struct GeodesicSupport {
  std::vector<SupportLeg> legs;
  std::vector<CommonEdge> common;

  std::size_t leg_count() const { return legs.size(); }

  // The vectors of the length formula: A_j = ||A^(j)||, B_j = ||B^(j)||,
  // C and D the common-edge lengths in source and target.
  std::vector<double> a_norms() const;
  std::vector<double> b_norms() const;
  std::vector<double> c_lengths() const;
  std::vector<double> d_lengths() const;

  // ||A + B||^2 + ||C - D||^2.
  double squared_length() const;
};

// Computes the support of the geodesic from x to y. Starts from the cone
// path (one leg holding every non-common split) and repeatedly splits legs
// whose bipartite incompatibility graph has a vertex cover of weight < 1.
// Throws LeafSetMismatch.
GeodesicSupport compute_support(const PhyloTree& x, const PhyloTree& y, PendantMode mode = PendantMode::ignore);

double distance(const PhyloTree& x, const PhyloTree& y, PendantMode mode = PendantMode::ignore);

class Geodesic {
 public:
  Geodesic(const PhyloTree& source, const PhyloTree& target, PendantMode mode = PendantMode::ignore);

  // Trees as seen by the metric (pendants stripped in `ignore` mode).
  const PhyloTree& source() const { return source_; }
  const PhyloTree& target() const { return target_; }
  const GeodesicSupport& support() const { return support_; }
  double length() const { return length_; }
  PendantMode mode() const { return mode_; }

  // gamma(t) for t in [0, 1]; splits shorter than 1e-12 are omitted.
  // Throws ParameterOutOfRange.
  PhyloTree at(double t) const;

  // Every A^(j) and B^(j) is a single split. Throws NotFullyResolved.
  bool is_simple() const;

 private:
  PhyloTree source_;
  PhyloTree target_;
  GeodesicSupport support_;
  double length_ = 0.0;
  PendantMode mode_;
};

inline PhyloTree point_on_geodesic(const Geodesic& g, double t) { return g.at(t); }
inline bool is_simple(const Geodesic& g) { return g.is_simple(); }

// Hashable token identifying a support: the ordered A and B split sets and
// the common split set. Equal tokens <=> identical supports.
struct SupportSignature {
  std::vector<std::vector<std::uint64_t>> a;
  std::vector<std::vector<std::uint64_t>> b;
  std::vector<std::uint64_t> c;

  bool operator==(const SupportSignature&) const = default;
  std::size_t hash() const;
};

SupportSignature support_signature(const GeodesicSupport& support);
SupportSignature support_signature(const PhyloTree& x, const PhyloTree& y, PendantMode mode = PendantMode::ignore);

}  // namespace treepca

template <>
struct std::hash<treepca::SupportSignature> {
  std::size_t operator()(const treepca::SupportSignature& s) const noexcept { return s.hash(); }
};
