#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "random_trees.hpp"
#include "treepca/errors.hpp"
#include "treepca/geodesic.hpp"
#include "treepca/moves.hpp"

namespace treepca {
namespace {

std::set<std::uint64_t> internal_masks(const PhyloTree& t) {
  std::set<std::uint64_t> out;
  for (const auto& e : t.internal_edges()) out.insert(e.split.mask());
  return out;
}

std::vector<std::uint64_t> only_in(const PhyloTree& a, const PhyloTree& b) {
  const auto x = internal_masks(a), y = internal_masks(b);
  std::vector<std::uint64_t> out;
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

// Children of the split's own node and its sibling, read off the clusters.
struct LocalShape {
  std::uint64_t c0, c1, sibling;
};

LocalShape local_shape(const PhyloTree& t, std::uint64_t edge) {
  const auto full = t.leaves()->full_mask();
  std::vector<std::uint64_t> clusters;
  for (const auto& e : t.edges()) clusters.push_back(e.split.mask());
  for (int i = 1; i <= t.n(); ++i) clusters.push_back(std::uint64_t{1} << i);
  clusters.push_back(full);
  auto smallest_above = [&](std::uint64_t m) {
    std::uint64_t best = full;
    for (auto c : clusters) {
      if (c != m && (c & m) == m && std::popcount(c) < std::popcount(best)) best = c;
    }
    return best;
  };
  std::vector<std::uint64_t> kids;
  for (auto c : clusters) {
    if (c != edge && (c & edge) == c && smallest_above(c) == edge) kids.push_back(c);
  }
  std::sort(kids.begin(), kids.end());
  kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  const auto parent = smallest_above(edge);
  return {kids.at(0), kids.at(1), parent & ~edge};
}

TEST(Nni, ReplacesExactlyOneSplit) {
  std::mt19937_64 rng(3);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = testing::random_resolved_tree(leaves, rng);
    for (const auto& e : t.internal_edges()) {
      for (int choice = 0; choice < 2; ++choice) {
        const auto u = nni(t, e.split, choice, lengths, rng);
        EXPECT_TRUE(u.is_fully_resolved());
        EXPECT_EQ(only_in(t, u), std::vector<std::uint64_t>{e.split.mask()});
        const auto added = only_in(u, t);
        ASSERT_EQ(added.size(), 1U);
        EXPECT_GT(u.length(Split(added[0])), 0.0);
        for (const auto& f : t.edges()) {
          if (f.split != e.split) EXPECT_DOUBLE_EQ(u.length(f.split), f.length);
        }
      }
    }
  }
}

TEST(Nni, ChoicesMatchLocalShape) {
  std::mt19937_64 rng(5);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(7);
  const auto t = testing::random_resolved_tree(leaves, rng);
  for (const auto& e : t.internal_edges()) {
    const auto shape = local_shape(t, e.split.mask());
    const auto keep1 = only_in(nni(t, e.split, 0, lengths, rng), t);
    const auto keep0 = only_in(nni(t, e.split, 1, lengths, rng), t);
    EXPECT_EQ(keep1, std::vector<std::uint64_t>{shape.c1 | shape.sibling});
    EXPECT_EQ(keep0, std::vector<std::uint64_t>{shape.c0 | shape.sibling});
  }
}

TEST(Nni, ThreeTopologiesAroundAnEdgeFormACycle) {
  std::mt19937_64 rng(7);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(6);
  for (int rep = 0; rep < 30; ++rep) {
    const auto t = testing::random_resolved_tree(leaves, rng);
    for (const auto& e : t.internal_edges()) {
      const auto u = nni(t, e.split, 0, lengths, rng);
      const Split created(only_in(u, t).at(0));
      bool back = false;
      for (int c = 0; c < 2; ++c) back = back || nni(u, created, c, lengths, rng).topology() == t.topology();
      EXPECT_TRUE(back);
    }
  }
}

TEST(Nni, RejectsPendantsAndMissingSplits) {
  std::mt19937_64 rng(1);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(5);
  const auto t = testing::random_resolved_tree(leaves, rng);
  EXPECT_THROW(nni(t, Split(std::uint64_t{1} << 2), 0, lengths, rng), InvalidEdge);
  std::uint64_t missing = 0;
  for (std::uint64_t m = 2; m < leaves->full_mask(); m += 2) {
    if (std::popcount(m) > 1 && !t.contains(Split(m))) {
      missing = m;
      break;
    }
  }
  ASSERT_NE(missing, 0U);
  EXPECT_THROW(nni(t, Split(missing), 0, lengths, rng), InvalidEdge);
  EXPECT_THROW(nni(t, t.internal_edges().at(0).split, 2, lengths, rng), InvalidEdge);
}

TEST(Spr, AdjacentRegraftIsAnNni) {
  std::mt19937_64 rng(11);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(7);
  for (int rep = 0; rep < 30; ++rep) {
    const auto t = testing::random_resolved_tree(leaves, rng);
    for (const auto& e : t.internal_edges()) {
      const auto shape = local_shape(t, e.split.mask());
      const auto moved = spr(t, Split(shape.c0), shape.sibling, lengths, rng);
      EXPECT_EQ(moved.topology(), nni(t, e.split, 1, lengths, rng).topology());
    }
  }
}

TEST(Spr, RandomMovesChangeTopologyAndStayValid) {
  std::mt19937_64 rng(13);
  const GammaLengths lengths;
  for (int n : {4, 6, 9}) {
    const auto leaves = LeafSet::numbered(n);
    for (int rep = 0; rep < 40; ++rep) {
      const auto t = testing::random_resolved_tree(leaves, rng);
      const auto u = random_spr(t, lengths, rng);
      EXPECT_TRUE(u.is_fully_resolved());
      EXPECT_NE(u.topology(), t.topology());
      // Pendant lengths survive unless the pruned node's sibling absorbed its parent.
      EXPECT_EQ(u.internal_count(), t.internal_count());
      const auto v = random_nni(t, lengths, rng);
      EXPECT_NE(v.topology(), t.topology());
    }
  }
}

TEST(Spr, KeepsTotalLengthUpToTheNewEdge) {
  std::mt19937_64 rng(17);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(6);
  auto total = [](const PhyloTree& t) {
    double s = 0.0;
    for (const auto& e : t.edges()) s += e.length;
    return s;
  };
  for (int rep = 0; rep < 40; ++rep) {
    const auto t = testing::random_resolved_tree(leaves, rng);
    const auto u = random_spr(t, lengths, rng);
    const auto added = only_in(u, t);
    double created = 0.0;
    for (auto m : added) created += u.length(Split(m));
    // Pruning merges two edges (no loss) unless the parent was the top
    // node, where the edge above it disappears.
    EXPECT_LE(total(u) - created, total(t) + 1e-9);
  }
}

TEST(Spr, RejectsNoOpsAndBadPositions) {
  std::mt19937_64 rng(19);
  const GammaLengths lengths;
  const auto leaves = LeafSet::numbered(6);
  const auto t = testing::random_resolved_tree(leaves, rng);
  const auto e = t.internal_edges().at(0);
  const auto shape = local_shape(t, e.split.mask());
  EXPECT_THROW(spr(t, Split(shape.c0), shape.c1, lengths, rng), InvalidGraft);
  EXPECT_THROW(spr(t, Split(shape.c0), shape.c0, lengths, rng), InvalidGraft);
}

TEST(RandomWalk, DisplacementScalesWithStepSize) {
  std::mt19937_64 rng(23);
  const auto leaves = LeafSet::numbered(8);
  const auto t = testing::random_resolved_tree(leaves, rng);
  const double dim = static_cast<double>(t.internal_count());
  const int steps = 10;
  const double step = 0.05;
  int within = 0;
  const int draws = 200;
  for (int i = 0; i < draws; ++i) {
    const auto u = random_walk(t, steps, step, rng);
    for (const auto& e : t.edges()) {
      if (e.split.is_pendant()) EXPECT_DOUBLE_EQ(u.length(e.split), e.length);
    }
    if (distance(t, u) <= 3.0 * step * std::sqrt(steps * dim)) ++within;
  }
  EXPECT_GE(within, draws * 99 / 100);
}

TEST(RandomWalk, LargeStepsCrossOrthants) {
  std::mt19937_64 rng(29);
  const auto leaves = LeafSet::numbered(8);
  const auto t = testing::random_resolved_tree(leaves, rng);
  int changed = 0;
  for (int i = 0; i < 50; ++i) {
    const auto u = random_walk(t, 10, 1.0, rng);
    if (u.topology() != t.topology()) ++changed;
    for (const auto& e : u.edges()) EXPECT_GT(e.length, 0.0);
  }
  EXPECT_GT(changed, 25);
}

TEST(RandomWalk, RejectsBadParameters) {
  std::mt19937_64 rng(31);
  const auto t = testing::random_resolved_tree(LeafSet::numbered(5), rng);
  EXPECT_THROW(random_walk(t, 0, 0.1, rng), ParameterOutOfRange);
  EXPECT_THROW(random_walk(t, 3, 0.0, rng), ParameterOutOfRange);
}

}  // namespace
}  // namespace treepca
