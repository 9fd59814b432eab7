#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "rif/ctfnet.hpp"
#include "rif/sampling.hpp"

namespace rif {

/// Maps a group to a fixed-length descriptor. Implementations are immutable
/// after construction and safe to share across threads.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual FeatureVector extract(const Group& group) const = 0;
};

class CtfNetExtractor final : public FeatureExtractor {
 public:
  explicit CtfNetExtractor(CtfNetParams params);

  std::size_t dim() const override { return kCtfNetDim; }
  std::string name() const override { return "ctfnet"; }
  FeatureVector extract(const Group& group) const override;

  const CtfNetParams& params() const { return params_; }

 private:
  CtfNetParams params_;
};

inline constexpr std::size_t kBaselineDim = 33;
inline constexpr std::size_t kDistanceBins = 16;
inline constexpr std::size_t kElevationBins = 12;

/// Handcrafted 33-d descriptor of a group:
///   [0..3)   covariance eigenvalues of the local points, descending
///   [3..5)   mean and standard deviation of center distances
///   [5..21)  16-bin center-distance histogram over [0, max distance]
///   [21..33) 12-bin elevation histogram, asin(z / r) over [-pi/2, pi/2]
/// Statistics and histograms skip the center itself; histograms sum to 1
/// whenever the group has more than one point.
FeatureVector baseline_descriptor(const Group& group);

class BaselineExtractor final : public FeatureExtractor {
 public:
  std::size_t dim() const override { return kBaselineDim; }
  std::string name() const override { return "baseline"; }
  FeatureVector extract(const Group& group) const override { return baseline_descriptor(group); }
};

}  // namespace rif
