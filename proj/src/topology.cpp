#include "treepca/topology.hpp"

#include <algorithm>
#include <bit>

namespace treepca {

std::vector<ClusterNode> cluster_nodes(const std::vector<Split>& internal, const LeafSet& leaves) {
  std::vector<std::uint64_t> clusters;
  clusters.push_back(leaves.full_mask());
  for (Split s : internal) clusters.push_back(s.mask());
  std::sort(clusters.begin(), clusters.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) != std::popcount(b) ? std::popcount(a) > std::popcount(b) : a < b;
  });
  std::vector<ClusterNode> nodes;
  for (auto c : clusters) nodes.push_back({c, {}});
  // Nodes are sorted by size, so the last container found is the smallest.
  auto parent_of = [&](std::uint64_t m, std::size_t limit) {
    std::size_t parent = 0;
    for (std::size_t j = 0; j < limit; ++j) {
      if ((nodes[j].mask & m) == m && nodes[j].mask != m) parent = j;
    }
    return parent;
  };
  for (std::size_t i = 1; i < nodes.size(); ++i) nodes[parent_of(nodes[i].mask, i)].children.push_back(nodes[i].mask);
  for (int leaf = 1; leaf <= leaves.n(); ++leaf) {
    const std::uint64_t m = std::uint64_t{1} << leaf;
    nodes[parent_of(m, nodes.size())].children.push_back(m);
  }
  for (auto& node : nodes) std::sort(node.children.begin(), node.children.end());
  return nodes;
}

namespace {

std::size_t double_factorial_capped(int m, std::size_t cap) {
  std::size_t out = 1;
  for (int k = 2 * m - 3; k > 1; k -= 2) {
    out *= static_cast<std::size_t>(k);
    if (out >= cap) return cap;
  }
  return out;
}

// Rooted binary trees grown by attaching item k to every edge of a tree on
// items 0..k-1 (including above the top). Clusters are kept with the top.
void grow(std::vector<std::uint32_t>& clusters, int k, int m, std::vector<std::vector<std::uint32_t>>& out) {
  if (k == m) {
    std::vector<std::uint32_t> inner;
    for (auto c : clusters) {
      const int size = std::popcount(c);
      if (size >= 2 && size <= m - 1) inner.push_back(c);
    }
    out.push_back(std::move(inner));
    return;
  }
  const std::uint32_t bit = 1U << k;
  const std::vector<std::uint32_t> base = clusters;
  for (std::size_t x = 0; x < base.size(); ++x) {
    const std::uint32_t target = base[x];
    std::vector<std::uint32_t> next;
    for (auto c : base) next.push_back(((c & target) == target && c != target) ? (c | bit) : c);
    next.push_back(target | bit);
    next.push_back(bit);
    grow(next, k + 1, m, out);
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> binary_resolutions(int m) {
  std::vector<std::vector<std::uint32_t>> out;
  if (m <= 2) {
    out.emplace_back();
    return out;
  }
  std::vector<std::uint32_t> clusters{0b01, 0b10, 0b11};
  grow(clusters, 2, m, out);
  return out;
}

std::size_t resolution_count(const std::vector<Split>& internal, const LeafSet& leaves, std::size_t cap) {
  std::size_t total = 1;
  for (const auto& node : cluster_nodes(internal, leaves)) {
    total *= double_factorial_capped(static_cast<int>(node.children.size()), cap);
    if (total >= cap) return cap;
  }
  return total;
}

std::vector<std::vector<Split>> resolutions(const std::vector<Split>& internal, const LeafSet& leaves) {
  std::vector<std::vector<Split>> out{internal};
  for (const auto& node : cluster_nodes(internal, leaves)) {
    const int m = static_cast<int>(node.children.size());
    if (m <= 2) continue;
    const auto options = binary_resolutions(m);
    std::vector<std::vector<Split>> next;
    next.reserve(out.size() * options.size());
    for (const auto& partial : out) {
      for (const auto& option : options) {
        auto splits = partial;
        for (auto c : option) {
          std::uint64_t mask = 0;
          for (int i = 0; i < m; ++i) {
            if ((c >> i) & 1U) mask |= node.children[static_cast<std::size_t>(i)];
          }
          splits.push_back(Split(mask));
        }
        next.push_back(std::move(splits));
      }
    }
    out = std::move(next);
  }
  for (auto& r : out) std::sort(r.begin(), r.end());
  return out;
}

namespace {

// Bron-Kerbosch with pivoting over the compatibility graph.
struct CliqueSearch {
  const std::vector<std::vector<bool>>& adjacent;
  std::size_t cap;
  std::vector<std::vector<std::size_t>> found;
  bool overflow = false;

  void run(std::vector<std::size_t>& chosen, std::vector<std::size_t> candidates, std::vector<std::size_t> excluded) {
    if (overflow) return;
    if (candidates.empty() && excluded.empty()) {
      if (found.size() >= cap) {
        overflow = true;
        return;
      }
      found.push_back(chosen);
      return;
    }
    std::size_t pivot = candidates.empty() ? excluded.front() : candidates.front();
    std::size_t best = 0;
    for (const auto* set : {&candidates, &excluded}) {
      for (auto u : *set) {
        std::size_t links = 0;
        for (auto v : candidates) links += adjacent[u][v] ? 1 : 0;
        if (links >= best) {
          best = links;
          pivot = u;
        }
      }
    }
    const auto snapshot = candidates;
    for (auto v : snapshot) {
      if (adjacent[pivot][v]) continue;
      std::vector<std::size_t> next_candidates, next_excluded;
      for (auto u : candidates) {
        if (adjacent[v][u]) next_candidates.push_back(u);
      }
      for (auto u : excluded) {
        if (adjacent[v][u]) next_excluded.push_back(u);
      }
      chosen.push_back(v);
      run(chosen, std::move(next_candidates), std::move(next_excluded));
      chosen.pop_back();
      if (overflow) return;
      candidates.erase(std::find(candidates.begin(), candidates.end(), v));
      excluded.push_back(v);
    }
  }
};

}  // namespace

std::optional<std::vector<std::vector<Split>>> compatible_extensions(const std::vector<Split>& base,
                                                                     const std::vector<Split>& pool, std::size_t cap) {
  const std::size_t n = pool.size();
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) adjacent[i][j] = adjacent[j][i] = compatible(pool[i], pool[j]);
  }
  CliqueSearch search{adjacent, cap, {}, false};
  std::vector<std::size_t> chosen, all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  search.run(chosen, all, {});
  if (search.overflow) return std::nullopt;
  std::vector<std::vector<Split>> out;
  for (const auto& clique : search.found) {
    std::vector<Split> splits = base;
    for (auto i : clique) splits.push_back(pool[i]);
    std::sort(splits.begin(), splits.end());
    out.push_back(std::move(splits));
  }
  return out;
}

}  // namespace treepca
