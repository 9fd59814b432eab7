#include "rif/augment.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "rif/error.hpp"
#include "test_support.hpp"

namespace rif {
namespace {

// Frozen values below come from tests/oracles/golden.py.

TEST(RngStream, SplitMixReferenceOutputs) {
  RngStream r(0);
  EXPECT_EQ(r.next_u64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r.next_u64(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(r.next_u64(), 0x06c45d188009454fULL);
  EXPECT_EQ(derive_seed(5, 2), 0xe9b7b8175c25d135ULL);
}

TEST(RngStream, UniformStaysBelowOne) {
  RngStream r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (std::uint64_t bound : {1u, 2u, 7u}) EXPECT_LT(r.below(bound), bound);
}

TEST(RandomScale, IdentityAndFixedFactor) {
  const PointCloud cube = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  RngStream rng(1);
  EXPECT_EQ(random_scale(cube, rng, S3daConfig::identity()), cube);

  S3daConfig two;
  two.scale_low = two.scale_high = 2.0;
  const PointCloud big = random_scale(cube, rng, two);
  for (std::size_t i = 0; i < cube.size(); ++i) EXPECT_EQ(big[i], 2.0 * cube[i]);
}

TEST(RandomScale, GoldenFactorsSeed42) {
  RngStream rng(42);
  const PointCloud out = random_scale({{1, 1, 1}}, rng, S3daConfig{});
  EXPECT_DOUBLE_EQ(out[0].x, 1.0966259515087293);
  EXPECT_DOUBLE_EQ(out[0].y, 0.8639641571507681);
  EXPECT_DOUBLE_EQ(out[0].z, 0.9114404521020555);
}

TEST(Jitter, ZeroSigmaOrClipIsIdentity) {
  const PointCloud p = {{1, 2, 3}, {-1, 0, 4}};
  S3daConfig cfg;
  cfg.jitter_sigma = 0.0;
  RngStream rng(7);
  EXPECT_EQ(jitter(p, rng, cfg), p);
  cfg.jitter_sigma = 0.01;
  cfg.jitter_clip = 0.0;
  EXPECT_EQ(jitter(p, rng, cfg), p);
  EXPECT_EQ(rng.state(), RngStream(7).state());  // nothing drawn
}

TEST(Jitter, GoldenSeed7) {
  RngStream rng(7);
  const PointCloud out = jitter({{0, 0, 0}, {1, 2, 3}}, rng, S3daConfig{});
  const double expected[6] = {0.009884743323187353, -0.018642558067312274, 3.9202072151893396e-05,
                              0.9947072929952581,   1.9954103038225914,    3.0045281521788407};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(out[i / 3][i % 3], expected[i]);
}

TEST(Jitter, BoundedByClip) {
  RngStream rng(70);
  S3daConfig cfg;
  cfg.jitter_sigma = 0.5;  // large sigma so the clamp is exercised
  cfg.jitter_clip = 0.05;
  const PointCloud p = testing::random_cloud(rng, 500);
  const PointCloud out = jitter(p, rng, cfg);
  EXPECT_LE(testing::max_abs_diff(p, out), 0.05 + 1e-15);
}

TEST(ZeroMask, IdentityWhenCountIsZero) {
  const PointCloud p = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  S3daConfig cfg;
  cfg.zero_fraction = 0.0;
  RngStream rng(3);
  EXPECT_EQ(zero_mask(p, rng, cfg), p);
  cfg.zero_fraction = 1.0 / 3.0 - 1e-9;  // floor(fraction * 3) = 0
  EXPECT_EQ(zero_mask(p, rng, cfg), p);
}

TEST(ZeroMask, GoldenIndicesSeed3) {
  PointCloud p;
  for (int i = 0; i < 8; ++i) p.push_back({i + 1.0, 1.0, 1.0});
  S3daConfig cfg;
  cfg.zero_fraction = 0.25;
  RngStream rng(3);
  const PointCloud out = zero_mask(p, rng, cfg);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool zeroed = i == 0 || i == 5;
    EXPECT_EQ(out[i], zeroed ? Point3{} : p[i]) << i;
  }
}

TEST(S3da, IdentityConfigIsIdentity) {
  RngStream rng(5);
  const PointCloud p = testing::random_cloud(rng, 20);
  EXPECT_EQ(s3da(p, rng, S3daConfig::identity()), p);
}

TEST(S3da, EqualsManualComposition) {
  RngStream a(9);
  const PointCloud p = testing::random_cloud(a, 100);
  RngStream r1(99), r2(99);
  S3daConfig cfg;
  cfg.zero_fraction = 0.1;
  const PointCloud manual = zero_mask(jitter(random_scale(p, r1, cfg), r1, cfg), r1, cfg);
  EXPECT_EQ(s3da(p, r2, cfg), manual);
}

TEST(S3da, GoldenSeed1) {
  RngStream rng(1);
  const PointCloud out = s3da({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}, rng, S3daConfig{});
  const double expected[12] = {1.016441643544171,     0.012172601012624948,  -0.0026924503449684534,
                               -0.014647800815647833, 1.0852179911067612,    -0.011308380173307877,
                               -0.003695512979907237, -0.007647612957256776, 1.2074127639297407,
                               1.0225048348306776,    1.0971345361928826,    1.18528273128664};
  for (std::size_t i = 0; i < 12; ++i) EXPECT_DOUBLE_EQ(out[i / 3][i % 3], expected[i]);
}

TEST(S3da, DeterministicAcrossThreads) {
  RngStream gen(4);
  const PointCloud p = testing::random_cloud(gen, 300);
  S3daConfig cfg;
  RngStream here(derive_seed(17, 0));
  const PointCloud expected = s3da(p, here, cfg);
  PointCloud from_thread;
  std::thread t([&] {
    RngStream there(derive_seed(17, 0));
    from_thread = s3da(p, there, cfg);
  });
  t.join();
  EXPECT_EQ(from_thread, expected);
  EXPECT_EQ(expected.size(), p.size());
}

TEST(S3daConfig, Validation) {
  S3daConfig cfg;
  cfg.scale_low = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.scale_low = 1.5;
  cfg.scale_high = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.jitter_sigma = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.zero_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  EXPECT_NO_THROW(S3daConfig{}.validate());
}

}  // namespace
}  // namespace rif
