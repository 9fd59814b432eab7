#include "rif/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rif/error.hpp"
#include "test_support.hpp"

namespace rif {
namespace {

// Fraction of (anomalous, normal) pairs ranked correctly, ties counting half.
double auroc_pairs(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  double good = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (l[i] == 1 && l[j] == 0) {
        total += 1.0;
        good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return good / total;
}

// Straight from the definition: one threshold per distinct score, then the
// extended curve integrated piecewise up to the cap.
double aupro_brute(const std::vector<ProSample>& samples, double cap) {
  std::set<double, std::greater<>> thresholds;
  for (const auto& s : samples) thresholds.insert(s.scores.begin(), s.scores.end());
  std::vector<std::pair<double, double>> curve;
  for (double t : thresholds) {
    double fp = 0, normals = 0, pro = 0, regions = 0;
    for (const auto& s : samples) {
      for (std::size_t i = 0; i < s.scores.size(); ++i)
        if (s.normal[i]) normals += 1, fp += s.scores[i] >= t;
      for (const auto& r : s.regions) {
        double hit = 0;
        for (auto i : r) hit += s.scores[i] >= t;
        pro += hit / double(r.size());
        regions += 1;
      }
    }
    curve.push_back({fp / normals, pro / regions});
  }
  curve.insert(curve.begin(), {0.0, curve.front().second});
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    auto [x0, y0] = curve[i - 1];
    auto [x1, y1] = curve[i];
    if (x0 >= cap) break;
    if (x1 > cap) {
      y1 = y0 + (y1 - y0) * (cap - x0) / (x1 - x0);
      x1 = cap;
    }
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  return area / cap;
}

ProSample six_point_sample() {
  ProSample s;
  s.scores = {0.9, 0.3, 0.8, 0.7, 0.2, 0.1};
  s.normal = {0, 0, 1, 0, 1, 1};
  s.regions = {{0, 1, 3}};
  return s;
}

ProSample random_sample(RngStream& rng, std::size_t n) {
  ProSample s;
  s.normal.assign(n, 1);
  std::size_t next = 0;
  while (next + 3 < n && rng.uniform() < 0.7) {
    const std::size_t len = 1 + rng.below(3);
    std::vector<std::size_t> region;
    for (std::size_t k = 0; k < len; ++k) region.push_back(next + k), s.normal[next + k] = 0;
    s.regions.push_back(region);
    next += len + 1;
  }
  for (std::size_t i = 0; i < n; ++i) s.scores.push_back(std::round(rng.uniform() * 8) / 8 + (s.normal[i] ? 0 : 0.2));
  return s;
}

TEST(Auroc, GoldenTieCase) { EXPECT_DOUBLE_EQ(auroc({1, 2, 2, 3}, {0, 1, 0, 1}), 0.875); }

TEST(Auroc, PerfectAndInverted) {
  EXPECT_EQ(auroc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auroc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}), 0.0);
  EXPECT_EQ(auroc({0.5, 0.5, 0.5}, {0, 1, 1}), 0.5);
}

TEST(Auroc, MatchesPairCountingOracle) {
  RngStream rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(80);
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = double(rng.below(10)), l[i] = std::uint8_t(rng.below(2));
    l[0] = 0;
    l[1] = 1;
    EXPECT_NEAR(auroc(s, l), auroc_pairs(s, l), 1e-12);
  }
}

TEST(Auroc, ComplementAndMonotoneTransform) {
  RngStream rng(42);
  std::vector<double> s(60);
  std::vector<std::uint8_t> l(60), flipped(60);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.gaussian();
    l[i] = std::uint8_t(i % 3 == 0);
    flipped[i] = 1 - l[i];
  }
  EXPECT_NEAR(auroc(s, l) + auroc(s, flipped), 1.0, 1e-12);
  std::vector<double> t = s;
  for (auto& v : t) v = std::exp(3 * v) + 7;
  EXPECT_EQ(auroc(s, l), auroc(t, l));
}

TEST(Auroc, Errors) {
  EXPECT_THROW(auroc({1, 2}, {1, 1}), UndefinedMetric);
  EXPECT_THROW(auroc({1, 2}, {0}), ShapeError);
  EXPECT_THROW(auroc({1, 2}, {0, 2}), InvalidConfig);
}

TEST(Aupro, GoldenSixPoints) {
  EXPECT_NEAR(aupro({six_point_sample()}, 0.3), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(aupro({six_point_sample()}, 1.0), 7.0 / 9.0, 1e-12);
}

TEST(Aupro, AllEqualScoresIsOne) {
  ProSample s;
  s.scores = {0.5, 0.5, 0.5, 0.5};
  s.normal = {0, 1, 0, 1};
  s.regions = {{0}, {2}};
  EXPECT_DOUBLE_EQ(aupro({s}, 0.3), 1.0);
}

TEST(Aupro, CurvePoints) {
  const auto curve = pro_curve({six_point_sample()});
  ASSERT_EQ(curve.size(), 6u);
  EXPECT_DOUBLE_EQ(curve[0].first, 0.0);
  EXPECT_DOUBLE_EQ(curve[0].second, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve[1].first, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve.back().first, 1.0);
  EXPECT_DOUBLE_EQ(curve.back().second, 1.0);
}

TEST(Aupro, MatchesDefinitionOnRandomSamples) {
  RngStream rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<ProSample> samples;
    for (int k = 0; k < 3; ++k) samples.push_back(random_sample(rng, 10 + rng.below(30)));
    samples[0].regions.push_back({samples[0].scores.size() - 1});
    samples[0].normal.back() = 0;
    for (double cap : {0.05, 0.3, 1.0}) EXPECT_NEAR(aupro(samples, cap), aupro_brute(samples, cap), 1e-12);
  }
}

TEST(Aupro, NonDecreasingInCap) {
  RngStream rng(44);
  std::vector<ProSample> samples = {random_sample(rng, 40), random_sample(rng, 40)};
  samples[0].regions.push_back({39});
  samples[0].normal[39] = 0;
  double last = 0.0;
  for (double cap = 0.05; cap <= 1.0; cap += 0.05) {
    const double v = aupro(samples, cap);
    EXPECT_GE(v, last - 1e-12);
    EXPECT_LE(v, 1.0);
    last = v;
  }
}

TEST(Aupro, Errors) {
  ProSample s = six_point_sample();
  s.regions.clear();
  EXPECT_THROW(aupro({s}), UndefinedMetric);
  s = six_point_sample();
  s.normal.assign(6, 0);
  EXPECT_THROW(aupro({s}), UndefinedMetric);
  EXPECT_THROW(aupro({six_point_sample()}, 0.0), InvalidConfig);
  EXPECT_THROW(aupro({six_point_sample()}, 1.5), InvalidConfig);
  s = six_point_sample();
  s.regions.push_back({0});
  EXPECT_THROW(aupro({s}), InvalidConfig);
}

TEST(Regions, ExplicitIdsGroupPoints) {
  const PointCloud cloud(5, Point3{});
  const auto regions = build_regions(cloud, {1, 1, 0, 1, 1}, {2, 1, 0, 2, 1});
  EXPECT_EQ(regions, (std::vector<std::vector<std::size_t>>{{1, 4}, {0, 3}}));
}

TEST(Regions, ConnectedComponentsByRadius) {
  // Unit spacing on a line; two runs of anomalous points separated by a gap of 3.
  PointCloud cloud;
  for (int i = 0; i < 12; ++i) cloud.push_back({double(i), 0, 0});
  EXPECT_DOUBLE_EQ(median_nn_spacing(cloud), 1.0);
  std::vector<std::uint8_t> labels(12, 0);
  for (int i : {1, 2, 3, 7, 9}) labels[i] = 1;
  const auto regions = build_regions(cloud, labels, {});
  EXPECT_EQ(regions, (std::vector<std::vector<std::size_t>>{{1, 2, 3}, {7, 9}}));
}

TEST(Evaluate, PerfectScoresGiveOnes) {
  PointCloud cloud;
  for (int i = 0; i < 6; ++i) cloud.push_back({double(i), 0, 0});
  EvalSample good{cloud, std::vector<double>(6, 0.1), 0.1, std::vector<std::uint8_t>(6, 0), {}};
  EvalSample bad{cloud, {0.1, 0.1, 0.9, 0.9, 0.1, 0.1}, 0.9, {0, 0, 1, 1, 0, 0}, {}};
  const MetricReport r = evaluate({good, bad});
  EXPECT_EQ(*r.p_auroc, 1.0);
  EXPECT_EQ(*r.o_auroc, 1.0);
  EXPECT_EQ(*r.p_aupro, 1.0);
  EXPECT_EQ(*r.o_aupro, 1.0);
}

TEST(Evaluate, ObjectAuproIsPartialAuroc) {
  PointCloud cloud;
  for (int i = 0; i < 3; ++i) cloud.push_back({double(i), 0, 0});
  std::vector<EvalSample> samples;
  const double objects[6] = {0.9, 0.3, 0.8, 0.7, 0.2, 0.1};
  const int anomalous[6] = {1, 1, 0, 1, 0, 0};
  for (int i = 0; i < 6; ++i) {
    std::vector<std::uint8_t> labels = {std::uint8_t(anomalous[i]), 0, 0};
    samples.push_back({cloud, {objects[i], 0, 0}, objects[i], labels, {}});
  }
  const MetricReport r = evaluate(samples, 0.3);
  EXPECT_NEAR(*r.o_aupro, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(*r.o_auroc, 7.0 / 9.0, 1e-12);
}

TEST(Evaluate, AllNormalLeavesMetricsUndefined) {
  const PointCloud cloud = {{0, 0, 0}, {1, 0, 0}};
  const MetricReport r = evaluate({{cloud, {0.2, 0.4}, 0.4, {0, 0}, {}}});
  EXPECT_FALSE(r.p_auroc);
  EXPECT_FALSE(r.o_aupro);
  const auto j = r.to_json();
  EXPECT_TRUE(j["P-AUROC"].is_null());
  EXPECT_EQ(j["fpr_cap"], 0.3);
  EXPECT_EQ(j["region_rule"], kRegionRule);
}

TEST(Evaluate, LengthMismatchIsShapeError) {
  const PointCloud cloud = {{0, 0, 0}, {1, 0, 0}};
  EXPECT_THROW(evaluate({{cloud, {0.2}, 0.4, {0, 0}, {}}}), ShapeError);
}

}  // namespace
}  // namespace rif
