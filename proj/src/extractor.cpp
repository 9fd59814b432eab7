#include "rif/extractor.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rif/error.hpp"

namespace rif {

CtfNetExtractor::CtfNetExtractor(CtfNetParams params) : params_(std::move(params)) {
  params_.validate();
}

FeatureVector CtfNetExtractor::extract(const Group& group) const {
  return ctf_extract(group.local_points, params_);
}

namespace {

// Splits weight w between the two bins whose centers bracket position t in
// [0, 1]; positions beyond the outer centers go entirely to the end bins.
template <std::size_t N>
void add_linear(std::array<double, N>& hist, double t, double w) {
  const double u = std::clamp(t, 0.0, 1.0) * static_cast<double>(N) - 0.5;
  if (u <= 0.0) {
    hist[0] += w;
    return;
  }
  if (u >= static_cast<double>(N - 1)) {
    hist[N - 1] += w;
    return;
  }
  const auto lo = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(lo);
  hist[lo] += w * (1.0 - frac);
  hist[lo + 1] += w * frac;
}

}  // namespace

FeatureVector baseline_descriptor(const Group& group) {
  FeatureVector out(kBaselineDim, 0.0f);
  const auto& pts = group.local_points;
  if (pts.size() <= 1) return out;

  Point3 mean;
  for (const auto& p : pts) mean += p;
  mean = mean / static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector3d d(p.x - mean.x, p.y - mean.y, p.z - mean.z);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = solver.eigenvalues();  // ascending
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(std::max(0.0, ev[2 - i]));

  // Member 0 is the center.
  const std::size_t m = pts.size() - 1;
  std::vector<double> dist(m);
  double sum = 0.0;
  double max_dist = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dist[i] = norm(pts[i + 1]);
    sum += dist[i];
    max_dist = std::max(max_dist, dist[i]);
  }
  const double mu = sum / static_cast<double>(m);
  double var = 0.0;
  for (double d : dist) var += (d - mu) * (d - mu);
  out[3] = static_cast<float>(mu);
  out[4] = static_cast<float>(std::sqrt(var / static_cast<double>(m)));

  const double w = 1.0 / static_cast<double>(m);
  std::array<double, kDistanceBins> dist_hist{};
  std::array<double, kElevationBins> elev_hist{};
  for (std::size_t i = 0; i < m; ++i) {
    const double t = max_dist > 0.0 ? dist[i] / max_dist : 0.0;
    add_linear(dist_hist, t, w);

    // Coincident points have no direction; count them at zero elevation.
    const double elevation = dist[i] > 0.0 ? std::asin(std::clamp(pts[i + 1].z / dist[i], -1.0, 1.0)) : 0.0;
    add_linear(elev_hist, (elevation + std::numbers::pi / 2) / std::numbers::pi, w);
  }
  for (std::size_t b = 0; b < kDistanceBins; ++b) out[5 + b] = static_cast<float>(dist_hist[b]);
  for (std::size_t b = 0; b < kElevationBins; ++b) out[5 + kDistanceBins + b] = static_cast<float>(elev_hist[b]);
  return out;
}

}  // namespace rif
