#include "rif/sampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "rif/geometry.hpp"
#include "test_support.hpp"

namespace rif {
namespace {

// Recomputes every candidate's distance to the whole chosen set at each step.
std::vector<std::size_t> fps_oracle(const PointCloud& cloud, std::size_t count) {
  const std::size_t n = cloud.size();
  std::vector<std::size_t> chosen;
  auto better = [&](double ka, std::size_t a, double kb, std::size_t b) {
    if (ka != kb) return ka > kb;
    if (cloud[a] != cloud[b]) return cloud[a] < cloud[b];
    return a < b;
  };
  while (chosen.size() < std::min(count, n)) {
    std::size_t best = n;
    double best_key = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      double key = chosen.empty() ? squared_norm(cloud[i]) : INFINITY;
      for (std::size_t c : chosen) key = std::min(key, squared_distance(cloud[i], cloud[c]));
      if (best == n || better(key, i, best_key, best)) {
        best = i;
        best_key = key;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

std::vector<std::size_t> knn_oracle(const PointCloud& cloud, std::size_t center, std::size_t k) {
  std::vector<std::size_t> idx(cloud.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if ((a == center) != (b == center)) return a == center;
    const double da = squared_distance(cloud[a], cloud[center]);
    const double db = squared_distance(cloud[b], cloud[center]);
    if (da != db) return da < db;
    if (cloud[a] != cloud[b]) return cloud[a] < cloud[b];
    return a < b;
  });
  idx.resize(std::min(k, cloud.size()));
  return idx;
}

PointCloud line_points() {
  PointCloud p;
  for (int x = 0; x <= 10; ++x) p.push_back({x - 5.0, 0, 0});
  return p;
}

TEST(Fps, LinePicksExtremesThenMidpoint) {
  const auto idx = farthest_point_sample(line_points(), 3);
  // +-5 tie on distance; the smaller coordinate tuple (x = -5) wins.
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 10, 5}));
  EXPECT_EQ(idx, fps_oracle(line_points(), 3));
}

TEST(Fps, CountEdgeCases) {
  const PointCloud p = line_points();
  const auto all = farthest_point_sample(p, p.size());
  EXPECT_EQ(std::set<std::size_t>(all.begin(), all.end()).size(), p.size());
  EXPECT_EQ(farthest_point_sample(p, 100).size(), p.size());
  EXPECT_EQ(farthest_point_sample(p, 1), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(farthest_point_sample({}, 4).empty());
}

TEST(Fps, MatchesExhaustiveOracle) {
  RngStream rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.below(62);
    PointCloud p = testing::random_cloud(rng, n);
    // Snap some clouds to a coarse grid so ties actually occur.
    if (trial % 2 == 0)
      for (auto& q : p) q = {std::round(q.x), std::round(q.y), std::round(q.z)};
    const std::size_t g = 1 + rng.below(n);
    EXPECT_EQ(farthest_point_sample(p, g), fps_oracle(p, g)) << "trial " << trial;
  }
}

TEST(Fps, CoverageRadiusBound) {
  RngStream rng(9);
  const PointCloud p = testing::random_cloud(rng, 300);
  const auto idx = farthest_point_sample(p, 30);
  // Min distance of the last selection to the earlier centers.
  double radius = INFINITY;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) radius = std::min(radius, distance(p[idx.back()], p[idx[j]]));
  for (const auto& q : p) {
    double nearest = INFINITY;
    for (std::size_t c : idx) nearest = std::min(nearest, distance(q, p[c]));
    EXPECT_LE(nearest, radius + 1e-12);
  }
}

TEST(Fps, IndependentOfInputOrder) {
  RngStream rng(10);
  const PointCloud p = testing::random_cloud(rng, 80);
  std::vector<std::size_t> perm(p.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  PointCloud shuffled;
  for (std::size_t i : perm) shuffled.push_back(p[i]);
  const auto a = farthest_point_sample(p, 20);
  const auto b = farthest_point_sample(shuffled, 20);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(p[a[i]], shuffled[b[i]]);
}

TEST(Fps, InvariantAfterPcm) {
  RngStream rng(12);
  const PointCloud p = testing::random_cloud(rng, 200);
  const auto base = farthest_point_sample(pcm_map(p).cloud, 16);
  for (int k = 0; k < 5; ++k) {
    const PointCloud moved = rigid_transform(p, random_rotation(rng), testing::random_translation(rng));
    EXPECT_EQ(farthest_point_sample(pcm_map(moved).cloud, 16), base);
  }
}

TEST(Knn, SingleNeighbourIsCenter) {
  const Group g = knn_group(line_points(), 4, 1);
  EXPECT_EQ(g.member_indices, (std::vector<std::size_t>{4}));
  ASSERT_EQ(g.local_points.size(), 1u);
  EXPECT_EQ(g.local_points[0], (Point3{0, 0, 0}));
}

TEST(Knn, FullGroupIsSortedByDistance) {
  RngStream rng(13);
  const PointCloud p = testing::random_cloud(rng, 50);
  const Group g = knn_group(p, 7, 500);
  ASSERT_EQ(g.member_indices.size(), p.size());
  EXPECT_EQ(g.member_indices[0], 7u);
  for (std::size_t i = 1; i < g.local_points.size(); ++i)
    EXPECT_LE(norm(g.local_points[i - 1]), norm(g.local_points[i]));
}

TEST(Knn, FivePointTieOrder) {
  // Points 1 and 2 tie at distance 1 from the center; (-1,0,0) < (1,0,0).
  const PointCloud p = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 2, 0}, {0, 0, 0.5}};
  const Group g = knn_group(p, 0, 5);
  EXPECT_EQ(g.member_indices, (std::vector<std::size_t>{0, 4, 2, 1, 3}));
  EXPECT_EQ(g.member_indices, knn_oracle(p, 0, 5));
}

TEST(Knn, CenterLeadsItsDuplicates) {
  const PointCloud p = {{1, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0, 0}};
  const Group g = knn_group(p, 2, 3);
  EXPECT_EQ(g.member_indices, (std::vector<std::size_t>{2, 0, 1}));
}

TEST(Knn, MatchesOracleOnGridClouds) {
  RngStream rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    PointCloud p = testing::random_cloud(rng, 40);
    for (auto& q : p) q = {std::round(q.x), std::round(q.y), std::round(q.z)};
    const std::size_t c = rng.below(p.size());
    const std::size_t k = 1 + rng.below(p.size());
    EXPECT_EQ(knn_group(p, c, k).member_indices, knn_oracle(p, c, k));
  }
}

TEST(Knn, LocalPointsIgnoreTranslation) {
  RngStream rng(15);
  const PointCloud p = testing::random_cloud(rng, 60);
  const PointCloud shifted = rigid_transform(p, identity3(), {3.5, -2.0, 1.25});
  const Group a = knn_group(p, 3, 12);
  const Group b = knn_group(shifted, 3, 12);
  EXPECT_EQ(a.member_indices, b.member_indices);
  EXPECT_LE(testing::max_abs_diff(a.local_points, b.local_points), 1e-12);
}

TEST(Knn, BadArguments) {
  EXPECT_THROW(knn_group(line_points(), 11, 3), std::out_of_range);
  EXPECT_ANY_THROW(knn_group(line_points(), 0, 0));
}

TEST(ExtractGroups, ParallelMatchesSequential) {
  RngStream rng(16);
  const PointCloud p = testing::random_cloud(rng, 500);
  const auto centers = farthest_point_sample(p, 40);
  const auto seq = extract_groups(p, centers, 32, 1);
  const auto par = extract_groups(p, centers, 32, 4);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].member_indices, par[i].member_indices);
    EXPECT_EQ(seq[i].local_points, par[i].local_points);
  }
}

}  // namespace
}  // namespace rif
