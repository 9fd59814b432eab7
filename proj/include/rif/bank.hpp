#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rif/extractor.hpp"
#include "rif/geometry.hpp"

namespace rif {

struct Provenance {
  std::size_t sample_id = 0;
  std::size_t center_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Features of normal training groups. Append-only while building; treat as
/// read-only once scoring starts.
class MemoryBank {
 public:
  MemoryBank() = default;
  explicit MemoryBank(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return provenance_.size(); }
  bool empty() const { return provenance_.empty(); }

  void append(std::span<const float> feature, Provenance origin);

  std::span<const float> vector(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const std::vector<float>& data() const { return data_; }
  const std::vector<Provenance>& provenance() const { return provenance_; }

  /// count * dim * sizeof(float).
  std::size_t memory_bytes() const { return data_.size() * sizeof(float); }

  friend bool operator==(const MemoryBank&, const MemoryBank&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<Provenance> provenance_;
};

struct NearestNeighbor {
  double distance = 0.0;
  std::size_t index = 0;
};

/// Exact L2 nearest neighbour by linear scan; ties resolve to the lowest index.
/// Squared distances accumulate in float64 in ascending component order.
NearestNeighbor nn_distance(const MemoryBank& bank, std::span<const float> query);

struct PipelineConfig {
  std::size_t group_count = 512;  // G
  std::size_t group_size = 512;   // K
  std::size_t threads = 1;
};

/// Output of the canonicalize / sample / group / extract chain for one cloud.
struct SampleFeatures {
  MappedCloud mapped;
  std::vector<std::size_t> centers;
  std::vector<FeatureVector> features;
};

SampleFeatures compute_features(const PointCloud& cloud, const FeatureExtractor& extractor,
                                const PipelineConfig& cfg);

/// Features of every training cloud, sample order then center order.
/// A degenerate cloud fails with its sample id in the message.
MemoryBank build_bank(const std::vector<PointCloud>& train, const FeatureExtractor& extractor,
                      const PipelineConfig& cfg);

struct ScoreReport {
  std::vector<std::size_t> center_indices;
  std::vector<double> center_scores;
  /// Bank index of each center's nearest feature.
  std::vector<std::size_t> nearest_bank_index;
  /// Every point inherits the score of its nearest center.
  std::vector<double> per_point_scores;
  double object_score = 0.0;
};

/// Score features against the bank and propagate to all points of `mapped`.
ScoreReport score_features(const MemoryBank& bank, const SampleFeatures& sample, std::size_t threads = 1);

ScoreReport score_sample(const MemoryBank& bank, const PointCloud& cloud, const FeatureExtractor& extractor,
                         const PipelineConfig& cfg);

/// For each point, the position (in `centers`) of the nearest center; ties
/// go to the earliest center.
std::vector<std::size_t> nearest_center(const PointCloud& cloud, const std::vector<std::size_t>& centers);

/// `path` holds tensor "bank.vectors" (count x dim); provenance goes to the
/// sidecar `path` + ".meta.jsonl", one {"sample_id", "center_index"} per line.
void save_bank(const MemoryBank& bank, const std::filesystem::path& path);
MemoryBank load_bank(const std::filesystem::path& path);
std::filesystem::path bank_meta_path(const std::filesystem::path& path);

}  // namespace rif
