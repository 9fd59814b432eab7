#include "rif/sampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rif/error.hpp"
#include "rif/parallel.hpp"

namespace rif {
namespace {

// True when candidate a beats b under (larger key, smaller coords, smaller index).
bool prefer_far(double key_a, const Point3& a, std::size_t ia, double key_b, const Point3& b,
                std::size_t ib) {
  if (key_a != key_b) return key_a > key_b;
  if (a != b) return a < b;
  return ia < ib;
}

}  // namespace

std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud, std::size_t count) {
  const std::size_t n = cloud.size();
  const std::size_t target = std::min(count, n);
  std::vector<std::size_t> chosen;
  if (target == 0) return chosen;
  chosen.reserve(target);

  std::size_t seed = 0;
  double seed_key = squared_norm(cloud[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double key = squared_norm(cloud[i]);
    if (prefer_far(key, cloud[i], i, seed_key, cloud[seed], seed)) {
      seed = i;
      seed_key = key;
    }
  }
  chosen.push_back(seed);

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  taken[seed] = 1;
  std::size_t last = seed;
  while (chosen.size() < target) {
    std::size_t best = n;
    double best_key = -1.0;
    const Point3 anchor = cloud[last];
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(min_dist[i], squared_distance(cloud[i], anchor));
      if (best == n || prefer_far(min_dist[i], cloud[i], i, best_key, cloud[best], best)) {
        best = i;
        best_key = min_dist[i];
      }
    }
    taken[best] = 1;
    chosen.push_back(best);
    last = best;
  }
  return chosen;
}

Group knn_group(const PointCloud& cloud, std::size_t center_index, std::size_t k) {
  if (center_index >= cloud.size()) throw std::out_of_range("knn_group: center index out of range");
  if (k == 0) throw InvalidConfig("knn_group: k must be >= 1");

  const std::size_t n = cloud.size();
  const Point3 center = cloud[center_index];
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = squared_distance(cloud[i], center);

  // The center leads even when exact duplicates of it exist.
  auto closer = [&](std::size_t a, std::size_t b) {
    if (a == center_index || b == center_index) return a == center_index && b != center_index;
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    if (cloud[a] != cloud[b]) return cloud[a] < cloud[b];
    return a < b;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), closer);
  order.resize(take);

  Group g;
  g.center_index = center_index;
  g.local_points.reserve(take);
  for (std::size_t idx : order) g.local_points.push_back(cloud[idx] - center);
  g.member_indices = std::move(order);
  return g;
}

std::vector<Group> extract_groups(const PointCloud& cloud, const std::vector<std::size_t>& centers,
                                  std::size_t k, std::size_t threads) {
  std::vector<Group> groups(centers.size());
  parallel_for(centers.size(), threads,
               [&](std::size_t i) { groups[i] = knn_group(cloud, centers[i], k); });
  return groups;
}

}  // namespace rif
