#include "treepca/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "treepca/errors.hpp"

namespace treepca {

namespace {

// A cover of weight below this certifies a strictly shorter refinement;
// ties (weight == 1) give equal-length decompositions and are not split.
constexpr double kCoverAcceptance = 1.0 - 1e-12;
constexpr double kFlowTolerance = 1e-15;
constexpr double kLengthCutoff = 1e-12;

struct LegWork {
  std::vector<Edge> a;
  std::vector<Edge> b;
};

double squared_sum(const std::vector<Edge>& edges) {
  double s = 0.0;
  for (const auto& e : edges) s += e.length * e.length;
  return s;
}

// Minimum-weight vertex cover of the bipartite graph with an edge between
// a[i] and b[j] whenever they are incompatible, via max-flow / min-cut
// (source -> a with capacity wa, b -> sink with capacity wb, a -> b infinite).
// Returns the cover weight and marks the covered vertices.
double min_weight_vertex_cover(const std::vector<double>& wa, const std::vector<double>& wb,
                               const std::vector<char>& incompatible, std::vector<char>& cover_a,
                               std::vector<char>& cover_b) {
  const std::size_t na = wa.size();
  const std::size_t nb = wb.size();
  std::vector<double> ra = wa;                // residual source -> a
  std::vector<double> rb = wb;                // residual b -> sink
  std::vector<double> flow(na * nb, 0.0);     // flow on a -> b (reverse residual)
  // BFS over 0..na-1 (a vertices) and na..na+nb-1 (b vertices).
  std::vector<int> parent(na + nb);
  std::vector<int> queue;
  queue.reserve(na + nb);
  std::vector<char> reached(na + nb);

  auto bfs = [&]() -> int {
    std::fill(parent.begin(), parent.end(), -2);
    std::fill(reached.begin(), reached.end(), 0);
    queue.clear();
    for (std::size_t i = 0; i < na; ++i) {
      if (ra[i] > kFlowTolerance) {
        parent[i] = -1;
        reached[i] = 1;
        queue.push_back(static_cast<int>(i));
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      if (static_cast<std::size_t>(v) < na) {
        const std::size_t i = static_cast<std::size_t>(v);
        for (std::size_t j = 0; j < nb; ++j) {
          const std::size_t node = na + j;
          if (!reached[node] && incompatible[i * nb + j]) {
            reached[node] = 1;
            parent[node] = v;
            if (rb[j] > kFlowTolerance) return static_cast<int>(node);
            queue.push_back(static_cast<int>(node));
          }
        }
      } else {
        const std::size_t j = static_cast<std::size_t>(v) - na;
        for (std::size_t i = 0; i < na; ++i) {
          if (!reached[i] && flow[i * nb + j] > kFlowTolerance) {
            reached[i] = 1;
            parent[i] = v;
            queue.push_back(static_cast<int>(i));
          }
        }
      }
    }
    return -1;
  };

  while (true) {
    const int sink_side = bfs();
    if (sink_side < 0) break;
    // Bottleneck along the path.
    double push = rb[static_cast<std::size_t>(sink_side) - na];
    int v = sink_side;
    while (parent[static_cast<std::size_t>(v)] != -1) {
      const int u = parent[static_cast<std::size_t>(v)];
      if (static_cast<std::size_t>(v) < na) {  // b(u) -> a(v): undo flow a(v)->b(u)
        push = std::min(push, flow[static_cast<std::size_t>(v) * nb + (static_cast<std::size_t>(u) - na)]);
      }
      v = u;
    }
    push = std::min(push, ra[static_cast<std::size_t>(v)]);
    // Apply.
    rb[static_cast<std::size_t>(sink_side) - na] -= push;
    v = sink_side;
    while (parent[static_cast<std::size_t>(v)] != -1) {
      const int u = parent[static_cast<std::size_t>(v)];
      if (static_cast<std::size_t>(v) < na) {
        flow[static_cast<std::size_t>(v) * nb + (static_cast<std::size_t>(u) - na)] -= push;
      } else {
        flow[static_cast<std::size_t>(u) * nb + (static_cast<std::size_t>(v) - na)] += push;
      }
      v = u;
    }
    ra[static_cast<std::size_t>(v)] -= push;
  }

  // `reached` now holds the source side of a minimum cut.
  cover_a.assign(na, 0);
  cover_b.assign(nb, 0);
  double weight = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    if (!reached[i]) {
      cover_a[i] = 1;
      weight += wa[i];
    }
  }
  for (std::size_t j = 0; j < nb; ++j) {
    if (reached[na + j]) {
      cover_b[j] = 1;
      weight += wb[j];
    }
  }
  return weight;
}

// Tries to split one leg; returns true and fills `first`/`second` when a
// cover of weight < 1 exists.
bool refine_leg(const LegWork& leg, LegWork& first, LegWork& second) {
  const std::size_t na = leg.a.size();
  const std::size_t nb = leg.b.size();
  if (na < 2 && nb < 2) return false;
  const double a2 = squared_sum(leg.a);
  const double b2 = squared_sum(leg.b);
  std::vector<double> wa(na), wb(nb);
  for (std::size_t i = 0; i < na; ++i) wa[i] = leg.a[i].length * leg.a[i].length / a2;
  for (std::size_t j = 0; j < nb; ++j) wb[j] = leg.b[j].length * leg.b[j].length / b2;
  std::vector<char> incompatible(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) incompatible[i * nb + j] = !compatible(leg.a[i].split, leg.b[j].split);
  }
  std::vector<char> cover_a, cover_b;
  const double weight = min_weight_vertex_cover(wa, wb, incompatible, cover_a, cover_b);
  if (!(weight < kCoverAcceptance)) return false;

  first = {};
  second = {};
  for (std::size_t i = 0; i < na; ++i) (cover_a[i] ? first.a : second.a).push_back(leg.a[i]);
  for (std::size_t j = 0; j < nb; ++j) (cover_b[j] ? second.b : first.b).push_back(leg.b[j]);
  return !first.a.empty() && !first.b.empty() && !second.a.empty() && !second.b.empty();
}

std::vector<Edge> filtered(const PhyloTree& t, PendantMode mode) {
  std::vector<Edge> out;
  out.reserve(t.edges().size());
  for (const auto& e : t.edges()) {
    if (mode == PendantMode::ignore && e.split.is_pendant()) continue;
    out.push_back(e);
  }
  return out;
}

void check_leaves(const PhyloTree& x, const PhyloTree& y) {
  if (!same_leaves(x.leaves(), y.leaves())) throw LeafSetMismatch("trees are defined over different leaf sets");
}

GeodesicSupport solve(const std::vector<Edge>& xs, const std::vector<Edge>& ys) {
  GeodesicSupport support;
  LegWork cone;
  // Common splits: present in either tree and compatible with both trees.
  for (const auto& e : xs) {
    bool ok = true;
    for (const auto& f : ys) {
      if (!compatible(e.split, f.split)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      double other = 0.0;
      for (const auto& f : ys) {
        if (f.split == e.split) other = f.length;
      }
      support.common.push_back({e.split, e.length, other});
    } else {
      cone.a.push_back(e);
    }
  }
  for (const auto& f : ys) {
    bool ok = true;
    bool shared = false;
    for (const auto& e : xs) {
      if (e.split == f.split) shared = true;
      if (!compatible(e.split, f.split)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (!shared) support.common.push_back({f.split, 0.0, f.length});
    } else {
      cone.b.push_back(f);
    }
  }
  std::sort(support.common.begin(), support.common.end(), [](const CommonEdge& p, const CommonEdge& q) { return p.split < q.split; });

  if (cone.a.empty()) return support;  // then cone.b is empty too

  std::vector<LegWork> legs;
  legs.push_back(std::move(cone));
  std::size_t j = 0;
  LegWork first, second;
  while (j < legs.size()) {
    if (refine_leg(legs[j], first, second)) {
      legs[j] = std::move(first);
      legs.insert(legs.begin() + static_cast<std::ptrdiff_t>(j) + 1, std::move(second));
    } else {
      ++j;
    }
  }
  support.legs.reserve(legs.size());
  for (auto& leg : legs) {
    SupportLeg out;
    out.a_norm = std::sqrt(squared_sum(leg.a));
    out.b_norm = std::sqrt(squared_sum(leg.b));
    out.a = std::move(leg.a);
    out.b = std::move(leg.b);
    support.legs.push_back(std::move(out));
  }
  return support;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> GeodesicSupport::a_norms() const {
  std::vector<double> out;
  for (const auto& leg : legs) out.push_back(leg.a_norm);
  return out;
}

std::vector<double> GeodesicSupport::b_norms() const {
  std::vector<double> out;
  for (const auto& leg : legs) out.push_back(leg.b_norm);
  return out;
}

std::vector<double> GeodesicSupport::c_lengths() const {
  std::vector<double> out;
  for (const auto& c : common) out.push_back(c.source_length);
  return out;
}

std::vector<double> GeodesicSupport::d_lengths() const {
  std::vector<double> out;
  for (const auto& c : common) out.push_back(c.target_length);
  return out;
}

double GeodesicSupport::squared_length() const {
  double sum = 0.0;
  for (const auto& leg : legs) {
    const double s = leg.a_norm + leg.b_norm;
    sum += s * s;
  }
  for (const auto& c : common) {
    const double d = c.source_length - c.target_length;
    sum += d * d;
  }
  return sum;
}

GeodesicSupport compute_support(const PhyloTree& x, const PhyloTree& y, PendantMode mode) {
  check_leaves(x, y);
  return solve(filtered(x, mode), filtered(y, mode));
}

double distance(const PhyloTree& x, const PhyloTree& y, PendantMode mode) {
  return std::sqrt(compute_support(x, y, mode).squared_length());
}

Geodesic::Geodesic(const PhyloTree& source, const PhyloTree& target, PendantMode mode)
    : source_(source.restricted(mode)), target_(target.restricted(mode)), mode_(mode) {
  check_leaves(source_, target_);
  support_ = solve(source_.edges(), target_.edges());
  length_ = std::sqrt(support_.squared_length());
}

PhyloTree Geodesic::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterOutOfRange("geodesic parameter must lie in [0, 1], got " + std::to_string(t));
  if (t == 0.0) return source_;
  if (t == 1.0) return target_;
  std::vector<Edge> edges;
  edges.reserve(source_.edges().size() + target_.edges().size());
  for (const auto& c : support_.common) {
    const double len = (1.0 - t) * c.source_length + t * c.target_length;
    if (len > kLengthCutoff) edges.push_back({c.split, len});
  }
  for (const auto& leg : support_.legs) {
    // Source splits shrink to zero at t_j = |A|/(|A|+|B|), then target splits grow.
    const double shrink = ((1.0 - t) * leg.a_norm - t * leg.b_norm);
    if (shrink > 0.0) {
      const double scale = shrink / leg.a_norm;
      for (const auto& e : leg.a) {
        const double len = e.length * scale;
        if (len > kLengthCutoff) edges.push_back({e.split, len});
      }
    } else {
      const double scale = -shrink / leg.b_norm;
      for (const auto& f : leg.b) {
        const double len = f.length * scale;
        if (len > kLengthCutoff) edges.push_back({f.split, len});
      }
    }
  }
  return PhyloTree::from_trusted(source_.leaves(), std::move(edges));
}

bool Geodesic::is_simple() const {
  if (!source_.is_fully_resolved() || !target_.is_fully_resolved()) {
    throw NotFullyResolved("simple geodesics are defined between fully resolved trees");
  }
  return std::all_of(support_.legs.begin(), support_.legs.end(),
                     [](const SupportLeg& leg) { return leg.a.size() == 1 && leg.b.size() == 1; });
}

// ---------------------------------------------------------------------------

std::size_t SupportSignature::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::uint64_t v) { h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& leg : a) {
    mix(0xA);
    for (auto m : leg) mix(m);
  }
  for (const auto& leg : b) {
    mix(0xB);
    for (auto m : leg) mix(m);
  }
  mix(0xC);
  for (auto m : c) mix(m);
  return h;
}

SupportSignature support_signature(const GeodesicSupport& support) {
  SupportSignature sig;
  for (const auto& leg : support.legs) {
    std::vector<std::uint64_t> a, b;
    for (const auto& e : leg.a) a.push_back(e.split.mask());
    for (const auto& f : leg.b) b.push_back(f.split.mask());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    sig.a.push_back(std::move(a));
    sig.b.push_back(std::move(b));
  }
  for (const auto& c : support.common) sig.c.push_back(c.split.mask());
  return sig;
}

SupportSignature support_signature(const PhyloTree& x, const PhyloTree& y, PendantMode mode) {
  return support_signature(compute_support(x, y, mode));
}

}  // namespace treepca
