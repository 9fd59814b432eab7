#pragma once

#include "rif/point.hpp"
#include "rif/rng.hpp"

namespace rif {

/// Parameters of the scale / jitter / zero-mask augmentation.
struct S3daConfig {
  double scale_low = 0.8;
  double scale_high = 1.2;
  double jitter_sigma = 0.01;
  double jitter_clip = 0.05;
  double zero_fraction = 0.05;

  /// Throws InvalidConfig when a bound is violated.
  void validate() const;

  /// Scale 1, no jitter, no zeroing.
  static S3daConfig identity() { return {1.0, 1.0, 0.0, 0.0, 0.0}; }
};

/// One uniform factor per axis (x, y, z draw order), applied about the origin.
PointCloud random_scale(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg);

/// Adds clamp(N(0, sigma^2), +-clip) per coordinate, point-major order.
/// Nothing is drawn when sigma or clip is zero.
PointCloud jitter(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg);

/// Zeroes floor(zero_fraction * n) distinct points chosen by a partial
/// Fisher-Yates shuffle.
PointCloud zero_mask(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg);

/// zero_mask(jitter(random_scale(cloud))) on one shared stream.
PointCloud s3da(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg);

}  // namespace rif
