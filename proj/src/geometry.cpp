#include "rif/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "rif/error.hpp"

namespace rif {
namespace {

Point3 residual(const Point3& v, const Point3* basis, std::size_t count) {
  Point3 r = v;
  for (std::size_t j = 0; j < count; ++j) r -= dot(r, basis[j]) * basis[j];
  return r;
}

}  // namespace

Point3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyCloud();
  Point3 sum;
  for (const auto& p : cloud) sum += p;
  return sum / static_cast<double>(cloud.size());
}

double cloud_scale(const PointCloud& cloud, const Point3& center) {
  double max_sq = 0.0;
  for (const auto& p : cloud) max_sq = std::max(max_sq, squared_distance(p, center));
  return 2.0 * std::sqrt(max_sq);
}

double diameter(const PointCloud& cloud) {
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      best = std::max(best, squared_distance(cloud[i], cloud[j]));
    }
  }
  return std::sqrt(best);
}

KeyVectors select_key_vectors(const PointCloud& cloud, const Point3& center) {
  const std::size_t n = cloud.size();
  if (n < 3) throw DegenerateCloud("need at least 3 points, got " + std::to_string(n));

  std::vector<double> dist_sq(n);
  for (std::size_t i = 0; i < n; ++i) dist_sq[i] = squared_distance(cloud[i], center);

  // Descending distance, stable on index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist_sq[a] > dist_sq[b]; });

  const double tol = kRankTolerance * cloud_scale(cloud, center);

  KeyVectors keys;
  keys.index[0] = order[0];
  keys.u[0] = cloud[order[0]] - center;
  const double n1 = norm(keys.u[0]);
  if (!(n1 > tol)) throw DegenerateCloud("all points coincide with the centroid");

  std::array<Point3, 2> basis;
  basis[0] = keys.u[0] / n1;

  bool found = false;
  for (std::size_t k = 1; k < n && !found; ++k) {
    const Point3 v = cloud[order[k]] - center;
    const Point3 r = residual(v, basis.data(), 1);
    if (norm(r) > tol) {
      keys.index[1] = order[k];
      keys.u[1] = v;
      basis[1] = r / norm(r);
      found = true;
    }
  }
  if (!found) throw DegenerateCloud("points are collinear");

  // Nearest viable point: ascending distance, ties again to the lowest index.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist_sq[a] < dist_sq[b]; });
  found = false;
  for (std::size_t k = 0; k < n && !found; ++k) {
    const std::size_t idx = order[k];
    if (idx == keys.index[0] || idx == keys.index[1]) continue;
    const Point3 v = cloud[idx] - center;
    if (norm(residual(v, basis.data(), 2)) > tol) {
      keys.index[2] = idx;
      keys.u[2] = v;
      found = true;
    }
  }
  if (!found) throw DegenerateCloud("points are coplanar");
  return keys;
}

Mat3 gram_schmidt(const KeyVectors& keys, double tolerance) {
  std::array<Point3, 3> e;
  for (std::size_t i = 0; i < 3; ++i) {
    const Point3 r = residual(keys.u[i], e.data(), i);
    const double len = norm(r);
    if (!(len > tolerance)) {
      throw NumericallyDegenerate("residual norm of u" + std::to_string(i + 1) +
                                  " is below tolerance");
    }
    e[i] = r / len;
  }
  return {{{e[0].x, e[0].y, e[0].z}, {e[1].x, e[1].y, e[1].z}, {e[2].x, e[2].y, e[2].z}}};
}

Mat3 gram_schmidt(const KeyVectors& keys) {
  double longest = 0.0;
  for (const auto& u : keys.u) longest = std::max(longest, norm(u));
  return gram_schmidt(keys, kRankTolerance * 2.0 * longest);
}

CanonicalFrame canonical_frame(const PointCloud& cloud) {
  CanonicalFrame frame;
  frame.centroid = centroid(cloud);
  const KeyVectors keys = select_key_vectors(cloud, frame.centroid);
  frame.basis = gram_schmidt(keys, kRankTolerance * cloud_scale(cloud, frame.centroid));
  return frame;
}

MappedCloud pcm_map(const PointCloud& cloud) {
  MappedCloud out;
  out.frame.centroid = centroid(cloud);
  out.keys = select_key_vectors(cloud, out.frame.centroid);
  out.frame.basis = gram_schmidt(out.keys, kRankTolerance * cloud_scale(cloud, out.frame.centroid));
  out.cloud.reserve(cloud.size());
  for (const auto& p : cloud) out.cloud.push_back(out.frame.map(p));
  return out;
}

}  // namespace rif
