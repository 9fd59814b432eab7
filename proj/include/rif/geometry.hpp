#pragma once

// Point Coordinate Mapping: canonicalizes a cloud into a frame derived from
// its own geometry so that any rigid motion of the input yields the same
// mapped coordinates.

#include <array>
#include <cstddef>

#include "rif/point.hpp"

namespace rif {

/// Independence threshold relative to the cloud scale.
inline constexpr double kRankTolerance = 1e-9;

struct KeyVectors {
  std::array<Point3, 3> u;
  std::array<std::size_t, 3> index{};
};

/// Centroid plus three orthonormal basis rows e1, e2, e3.
/// The determinant may be -1; handedness is not forced.
struct CanonicalFrame {
  Point3 centroid;
  Mat3 basis = identity3();

  /// (p - centroid) expressed in the basis.
  Point3 map(const Point3& p) const { return mat_vec(basis, p - centroid); }
};

struct MappedCloud {
  PointCloud cloud;
  CanonicalFrame frame;
  KeyVectors keys;
};

/// Arithmetic mean. Throws EmptyCloud.
Point3 centroid(const PointCloud& cloud);

/// Scale used by the independence checks: twice the largest centroid
/// distance, an upper bound on the diameter within a factor of two.
double cloud_scale(const PointCloud& cloud, const Point3& center);

/// Exact diameter, O(n^2).
double diameter(const PointCloud& cloud);

/// Picks u1 (farthest point), u2 (next farthest independent of u1) and u3
/// (nearest point completing rank 3). Equal distances resolve to the lowest
/// input index. Throws DegenerateCloud when no rank-3 triple exists.
KeyVectors select_key_vectors(const PointCloud& cloud, const Point3& center);

/// Modified Gram-Schmidt on (u1, u2, u3). A residual norm at or below
/// `tolerance` throws NumericallyDegenerate.
Mat3 gram_schmidt(const KeyVectors& keys, double tolerance);

/// Same, with tolerance 1e-9 * 2 * max |u_i|.
Mat3 gram_schmidt(const KeyVectors& keys);

CanonicalFrame canonical_frame(const PointCloud& cloud);

/// Full mapping. Output point i corresponds to input point i.
MappedCloud pcm_map(const PointCloud& cloud);

}  // namespace rif
