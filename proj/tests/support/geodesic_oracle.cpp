#include "geodesic_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace treepca::testing {

namespace {

// All maps from n items onto {0..l-1} that hit every block.
std::vector<std::vector<int>> surjections(std::size_t n, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> assign(n, 0);
  while (true) {
    std::vector<bool> hit(static_cast<std::size_t>(l), false);
    for (int v : assign) hit[static_cast<std::size_t>(v)] = true;
    bool onto = true;
    for (bool h : hit) onto = onto && h;
    if (onto) out.push_back(assign);
    std::size_t k = 0;
    while (k < n && ++assign[k] == l) assign[k++] = 0;
    if (k == n) break;
  }
  return out;
}

}  // namespace

OracleSupport brute_force_support(const PhyloTree& x, const PhyloTree& y, PendantMode mode) {
  const PhyloTree xs = x.restricted(mode);
  const PhyloTree ys = y.restricted(mode);
  std::vector<Edge> a_all, b_all;
  double common_sq = 0.0;
  auto compatible_with_all = [](Split s, const PhyloTree& t) {
    for (const auto& e : t.edges()) {
      if (!compatible(s, e.split)) return false;
    }
    return true;
  };
  for (const auto& e : xs.edges()) {
    if (compatible_with_all(e.split, ys)) {
      const double d = e.length - ys.length(e.split);
      common_sq += d * d;
    } else {
      a_all.push_back(e);
    }
  }
  for (const auto& f : ys.edges()) {
    if (compatible_with_all(f.split, xs)) {
      if (!xs.contains(f.split)) common_sq += f.length * f.length;
    } else {
      b_all.push_back(f);
    }
  }

  OracleSupport best;
  best.squared_length = common_sq;
  if (a_all.empty()) return best;
  if (a_all.size() > 6 || b_all.size() > 6) throw std::invalid_argument("oracle limited to 6 non-common splits per tree");

  best.squared_length = std::numeric_limits<double>::infinity();
  const int max_legs = static_cast<int>(std::min(a_all.size(), b_all.size()));
  for (int l = 1; l <= max_legs; ++l) {
    const auto a_maps = surjections(a_all.size(), l);
    const auto b_maps = surjections(b_all.size(), l);
    for (const auto& am : a_maps) {
      for (const auto& bm : b_maps) {
        // Path validity: a split leaving in leg i must be compatible with
        // every split that arrived in an earlier leg j < i.
        bool valid = true;
        for (std::size_t i = 0; i < a_all.size() && valid; ++i) {
          for (std::size_t j = 0; j < b_all.size() && valid; ++j) {
            if (am[i] > bm[j] && !compatible(a_all[i].split, b_all[j].split)) valid = false;
          }
        }
        if (!valid) continue;
        std::vector<double> an(static_cast<std::size_t>(l), 0.0), bn(static_cast<std::size_t>(l), 0.0);
        for (std::size_t i = 0; i < a_all.size(); ++i) an[static_cast<std::size_t>(am[i])] += a_all[i].length * a_all[i].length;
        for (std::size_t j = 0; j < b_all.size(); ++j) bn[static_cast<std::size_t>(bm[j])] += b_all[j].length * b_all[j].length;
        double sq = common_sq;
        double prev_ratio = 0.0;
        for (std::size_t k = 0; k < an.size(); ++k) {
          an[k] = std::sqrt(an[k]);
          bn[k] = std::sqrt(bn[k]);
          const double ratio = an[k] / bn[k];
          if (ratio < prev_ratio) valid = false;
          prev_ratio = ratio;
          sq += (an[k] + bn[k]) * (an[k] + bn[k]);
        }
        if (!valid) continue;
        if (sq < best.squared_length) {
          best.squared_length = sq;
          best.a.assign(static_cast<std::size_t>(l), {});
          best.b.assign(static_cast<std::size_t>(l), {});
          for (std::size_t i = 0; i < a_all.size(); ++i) best.a[static_cast<std::size_t>(am[i])].push_back(a_all[i].split);
          for (std::size_t j = 0; j < b_all.size(); ++j) best.b[static_cast<std::size_t>(bm[j])].push_back(b_all[j].split);
        }
      }
    }
  }
  return best;
}

double brute_force_distance(const PhyloTree& x, const PhyloTree& y, PendantMode mode) {
  return std::sqrt(brute_force_support(x, y, mode).squared_length);
}

}  // namespace treepca::testing
