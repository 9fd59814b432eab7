#include "rif/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rif/error.hpp"

namespace rif {

void S3daConfig::validate() const {
  if (!(scale_low > 0.0) || !(scale_low <= scale_high))
    throw InvalidConfig("scale bounds must satisfy 0 < scale_low <= scale_high");
  if (!(jitter_sigma >= 0.0)) throw InvalidConfig("jitter_sigma must be >= 0");
  if (!(jitter_clip >= 0.0)) throw InvalidConfig("jitter_clip must be >= 0");
  if (!(zero_fraction >= 0.0) || !(zero_fraction < 1.0))
    throw InvalidConfig("zero_fraction must be in [0, 1)");
}

PointCloud random_scale(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg) {
  cfg.validate();
  const double sx = rng.uniform(cfg.scale_low, cfg.scale_high);
  const double sy = rng.uniform(cfg.scale_low, cfg.scale_high);
  const double sz = rng.uniform(cfg.scale_low, cfg.scale_high);
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back({p.x * sx, p.y * sy, p.z * sz});
  return out;
}

PointCloud jitter(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg) {
  cfg.validate();
  if (cfg.jitter_sigma == 0.0 || cfg.jitter_clip == 0.0) return cloud;
  auto draw = [&] {
    return std::clamp(cfg.jitter_sigma * rng.gaussian(), -cfg.jitter_clip, cfg.jitter_clip);
  };
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    const double dx = draw();
    const double dy = draw();
    const double dz = draw();
    out.push_back({p.x + dx, p.y + dy, p.z + dz});
  }
  return out;
}

PointCloud zero_mask(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg) {
  cfg.validate();
  const std::size_t n = cloud.size();
  const auto count = static_cast<std::size_t>(std::floor(cfg.zero_fraction * static_cast<double>(n)));
  PointCloud out = cloud;
  if (count == 0) return out;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(perm[i], perm[j]);
    out[perm[i]] = Point3{};
  }
  return out;
}

PointCloud s3da(const PointCloud& cloud, RngStream& rng, const S3daConfig& cfg) {
  return zero_mask(jitter(random_scale(cloud, rng, cfg), rng, cfg), rng, cfg);
}

}  // namespace rif
