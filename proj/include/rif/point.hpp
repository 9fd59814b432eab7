#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <vector>

namespace rif {

/// A 3D point or displacement in float64 model units.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Point3& operator-=(const Point3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  friend constexpr Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend constexpr Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
  friend constexpr Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
  friend constexpr Point3 operator*(const Point3& p, double s) { return s * p; }
  friend constexpr Point3 operator/(const Point3& p, double s) { return {p.x / s, p.y / s, p.z / s}; }

  friend constexpr bool operator==(const Point3&, const Point3&) = default;
  /// Lexicographic (x, y, z). Used as the deterministic tie-break everywhere.
  friend constexpr auto operator<=>(const Point3&, const Point3&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double squared_norm(const Point3& p) { return dot(p, p); }
inline double norm(const Point3& p) { return std::sqrt(squared_norm(p)); }
constexpr double squared_distance(const Point3& a, const Point3& b) { return squared_norm(a - b); }
inline double distance(const Point3& a, const Point3& b) { return std::sqrt(squared_distance(a, b)); }

/// Ordered point list. Every transform in the library preserves order.
using PointCloud = std::vector<Point3>;

/// Row-major 3x3 matrix of float64.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Point3 row(const Mat3& m, std::size_t r) { return {m[r][0], m[r][1], m[r][2]}; }

/// m * p, treating p as a column vector.
inline Point3 mat_vec(const Mat3& m, const Point3& p) {
  return {dot(row(m, 0), p), dot(row(m, 1), p), dot(row(m, 2), p)};
}

inline double determinant(const Mat3& m) {
  return dot(row(m, 0), cross(row(m, 1), row(m, 2)));
}

/// R * p + t for every point.
inline PointCloud rigid_transform(const PointCloud& cloud, const Mat3& rotation, const Point3& translation) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(mat_vec(rotation, p) + translation);
  return out;
}

}  // namespace rif
