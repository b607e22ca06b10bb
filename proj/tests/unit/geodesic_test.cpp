#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "geodesic_oracle.hpp"
#include "random_trees.hpp"
#include "treepca/errors.hpp"
#include "treepca/geodesic.hpp"

namespace treepca {
namespace {

using testing::fig1;

std::set<Split> splits_of(const std::vector<Edge>& edges) {
  std::set<Split> out;
  for (const auto& e : edges) out.insert(e.split);
  return out;
}

std::set<Split> common_of(const GeodesicSupport& s) {
  std::set<Split> out;
  for (const auto& c : s.common) out.insert(c.split);
  return out;
}

TEST(Support, ConePathBetweenV1V2) {
  const auto& f = fig1();
  const auto s = compute_support(f.v1, f.v2);
  ASSERT_EQ(s.leg_count(), 1U);
  EXPECT_EQ(splits_of(s.legs[0].a), (std::set<Split>{f.s345, f.s45}));
  EXPECT_EQ(splits_of(s.legs[0].b), (std::set<Split>{f.s23, f.s234}));
  EXPECT_EQ(common_of(s), std::set<Split>{f.s01});
}

TEST(Support, SingleSwapBetweenV0V1) {
  const auto& f = fig1();
  const auto s = compute_support(f.v0, f.v1);
  ASSERT_EQ(s.leg_count(), 1U);
  EXPECT_EQ(splits_of(s.legs[0].a), std::set<Split>{f.s23});
  EXPECT_EQ(splits_of(s.legs[0].b), std::set<Split>{f.s345});
  EXPECT_EQ(common_of(s), (std::set<Split>{f.s45, f.s01}));
}

TEST(Support, IdenticalTrees) {
  const auto& f = fig1();
  const auto s = compute_support(f.v0, f.v0);
  EXPECT_EQ(s.leg_count(), 0U);
  EXPECT_EQ(common_of(s), (std::set<Split>{f.s23, f.s45, f.s01}));
}

TEST(Distance, FixtureValues) {
  const auto& f = fig1();
  EXPECT_NEAR(distance(f.v1, f.v2), 2 * std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(distance(f.v0, f.v1), std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(distance(f.v0, f.v2), std::sqrt(10.0), 1e-12);
  EXPECT_EQ(distance(f.v0, f.v0), 0.0);
}

TEST(Distance, LeafSetMismatch) {
  std::mt19937_64 rng(1);
  const auto a = testing::random_resolved_tree(LeafSet::numbered(5), rng);
  const auto b = testing::random_resolved_tree(LeafSet::numbered(6), rng);
  EXPECT_THROW(distance(a, b), LeafSetMismatch);
  EXPECT_THROW(compute_support(a, b), LeafSetMismatch);
}

TEST(Geodesic, FixturePoints) {
  const auto& f = fig1();
  const Geodesic cone(f.v1, f.v2);
  const auto mid = f.coordinates(cone.at(0.5));
  EXPECT_NEAR(mid[0], 0, 1e-12);
  EXPECT_NEAR(mid[1], 0, 1e-12);
  EXPECT_NEAR(mid[2], 1, 1e-12);
  EXPECT_EQ(cone.at(0.5).internal_count(), 1U);

  const Geodesic straight(f.v0, f.v1);
  const auto third = f.coordinates(straight.at(1.0 / 3));
  EXPECT_NEAR(third[0], 0, 1e-12);
  EXPECT_NEAR(third[1], 1, 1e-12);
  EXPECT_NEAR(third[2], 5.0 / 3, 1e-12);

  EXPECT_TRUE(straight.at(0).equals(f.v0, 0));
  EXPECT_TRUE(straight.at(1).equals(f.v1, 0));
  EXPECT_THROW(straight.at(1.5), ParameterOutOfRange);
  EXPECT_THROW(straight.at(-0.1), ParameterOutOfRange);
}

TEST(Geodesic, Simplicity) {
  const auto& f = fig1();
  EXPECT_TRUE(Geodesic(f.v0, f.v1).is_simple());
  EXPECT_FALSE(Geodesic(f.v1, f.v2).is_simple());
  EXPECT_TRUE(Geodesic(f.v0, f.at(2, 3, 1)).is_simple());
  EXPECT_THROW(Geodesic(f.v0, f.at(0, 1, 1)).is_simple(), NotFullyResolved);
}

TEST(Signature, DistinguishesDegenerateSupport) {
  const auto& f = fig1();
  const auto base = support_signature(f.v0, f.v0);
  EXPECT_EQ(base, support_signature(f.v0, f.v0));
  EXPECT_NE(base, support_signature(f.v0, f.at(-0.1, 1, 2)));
}

TEST(Signature, FiveRegionsOnFixtureGrid) {
  // Supports of (x, v0), (x, v1), (x, v2) over a grid covering the three
  // orthants of the configuration at xi3 = 1.
  const auto& f = fig1();
  std::set<std::vector<std::size_t>> regions;
  for (double a = -3.05; a < 3; a += 0.1) {
    for (double b = -3.05; b < 3; b += 0.1) {
      if (a < 0 && b < 0) continue;
      const auto x = f.at(a, b, 1);
      std::vector<std::size_t> key;
      for (const auto& v : f.vertices()) key.push_back(support_signature(x, v).hash());
      regions.insert(key);
    }
  }
  EXPECT_EQ(regions.size(), 5U);
}

TEST(Distance, AgreesWithBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + trial % 3;
    const auto leaves = LeafSet::numbered(n);
    const auto x = testing::random_resolved_tree(leaves, rng);
    const auto y = testing::random_tree_near(testing::random_resolved_tree(leaves, rng), rng);
    const auto mode = trial % 2 ? PendantMode::include : PendantMode::ignore;
    EXPECT_NEAR(distance(x, y, mode), testing::brute_force_distance(x, y, mode), 1e-8) << trial;
  }
}

TEST(Distance, SupportInvariants) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto leaves = LeafSet::numbered(4 + trial % 6);
    const auto x = testing::random_resolved_tree(leaves, rng, false);
    const auto y = testing::random_tree_near(x, rng);
    const auto s = compute_support(x, y);
    std::set<Split> xs, ys;
    for (std::size_t j = 0; j < s.leg_count(); ++j) {
      if (j > 0) EXPECT_LE(s.legs[j - 1].ratio(), s.legs[j].ratio() * (1 + 1e-12));
      for (const auto& e : s.legs[j].a) EXPECT_TRUE(xs.insert(e.split).second);
      for (const auto& e : s.legs[j].b) EXPECT_TRUE(ys.insert(e.split).second);
      for (std::size_t i = j + 1; i < s.leg_count(); ++i) {
        for (const auto& a : s.legs[i].a) {
          for (const auto& b : s.legs[j].b) EXPECT_TRUE(compatible(a.split, b.split));
        }
      }
      for (const auto& b : s.legs[j].b) {
        for (const auto& c : s.common) EXPECT_TRUE(compatible(b.split, c.split));
      }
    }
    for (const auto& c : s.common) {
      if (c.source_length > 0) xs.insert(c.split);
      if (c.target_length > 0) ys.insert(c.split);
    }
    EXPECT_EQ(xs, splits_of(x.without_pendants().edges()));
    EXPECT_EQ(ys, splits_of(y.without_pendants().edges()));

    // Length formula equals the inner-product expansion.
    double ab = 0, cd = 0;
    for (const auto& leg : s.legs) ab += leg.a_norm * leg.b_norm;
    for (const auto& c : s.common) cd += c.source_length * c.target_length;
    const double expanded = squared_norm(x) + squared_norm(y) + 2 * ab - 2 * cd;
    EXPECT_NEAR(s.squared_length(), expanded, 1e-9 * (1 + expanded));

    // Cone path bound.
    double a_all = 0, b_all = 0, common = 0;
    for (const auto& leg : s.legs) {
      a_all += leg.a_norm * leg.a_norm;
      b_all += leg.b_norm * leg.b_norm;
    }
    for (const auto& c : s.common) common += (c.source_length - c.target_length) * (c.source_length - c.target_length);
    const double cone = std::pow(std::sqrt(a_all) + std::sqrt(b_all), 2) + common;
    EXPECT_LE(s.squared_length(), cone + 1e-9);
  }
}

TEST(Distance, SymmetricWithReversedSupport) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto leaves = LeafSet::numbered(7);
    const auto x = testing::random_resolved_tree(leaves, rng);
    const auto y = testing::random_tree_near(x, rng);
    EXPECT_NEAR(distance(x, y), distance(y, x), 1e-10);
    const auto sxy = compute_support(x, y);
    const auto syx = compute_support(y, x);
    ASSERT_EQ(sxy.leg_count(), syx.leg_count());
    const std::size_t l = sxy.leg_count();
    for (std::size_t j = 0; j < l; ++j) {
      EXPECT_EQ(splits_of(sxy.legs[j].a), splits_of(syx.legs[l - 1 - j].b));
      EXPECT_EQ(splits_of(sxy.legs[j].b), splits_of(syx.legs[l - 1 - j].a));
    }
  }
}

TEST(Distance, SameOrthantIsEuclidean) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto leaves = LeafSet::numbered(8);
    const auto x = testing::random_resolved_tree(leaves, rng);
    std::vector<Edge> edges = x.edges();
    double sq = 0;
    for (auto& e : edges) {
      const double l = u(rng);
      sq += (l - e.length) * (l - e.length);
      e.length = l;
    }
    const auto y = PhyloTree::validated(leaves, edges);
    EXPECT_NEAR(distance(x, y, PendantMode::include), std::sqrt(sq), 1e-12);
  }
}

TEST(Geodesic, ConstantSpeed) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto leaves = LeafSet::numbered(6);
    const auto x = testing::random_resolved_tree(leaves, rng);
    const auto y = testing::random_tree_near(testing::random_resolved_tree(leaves, rng), rng);
    const Geodesic g(x, y);
    const double s = u(rng), t = u(rng);
    EXPECT_NEAR(distance(g.at(s), g.at(t)), std::abs(s - t) * g.length(), 1e-9 * (1 + g.length()));
  }
}

TEST(Cat0, TriangleAndMidpoint) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto leaves = LeafSet::numbered(6);
    const auto x = testing::random_resolved_tree(leaves, rng);
    const auto y = testing::random_tree_near(x, rng);
    const auto z = testing::random_resolved_tree(leaves, rng);
    const double dxy = distance(x, y), dyz = distance(y, z), dxz = distance(x, z);
    EXPECT_LE(dxz, dxy + dyz + 1e-9);
    const auto m = Geodesic(x, y).at(0.5);
    const double dzm = distance(z, m);
    EXPECT_LE(dzm * dzm, 0.5 * dxz * dxz + 0.5 * dyz * dyz - 0.25 * dxy * dxy + 1e-9);
  }
}

}  // namespace
}  // namespace treepca
