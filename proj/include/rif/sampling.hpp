#pragma once

#include <cstddef>
#include <vector>

#include "rif/point.hpp"

namespace rif {

/// An FPS center and its K nearest neighbours, sorted by ascending distance
/// to the center. The center is always the first member.
struct Group {
  std::size_t center_index = 0;
  std::vector<std::size_t> member_indices;
  /// Member coordinates minus the center coordinates.
  PointCloud local_points;
};

/// Greedy farthest point sampling over (already mapped) coordinates.
///
/// The seed is the point farthest from the origin. Each following center
/// maximizes the minimum distance to the chosen set. Ties resolve to the
/// lexicographically smallest coordinates, then the lowest index, so the
/// result depends only on coordinates and not on input order.
/// Returns min(count, n) distinct indices in selection order.
std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t count);

/// The min(k, n) nearest points to `cloud[center_index]` by Euclidean
/// distance, ties broken lexicographically by coordinates then index.
Group knn_group(const PointCloud& cloud, std::size_t center_index, std::size_t k);

/// knn_group for every center, optionally on several threads. The result is
/// identical to the sequential one.
std::vector<Group> extract_groups(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                                  std::size_t k, std::size_t threads = 1);

}  // namespace rif
