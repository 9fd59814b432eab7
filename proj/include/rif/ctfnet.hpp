#pragma once

// Forward-only convolutional transform feature network. Inputs are groups of
// points ordered by distance to their center; every convolution runs along
// that point axis with zero "same" padding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rif/point.hpp"
#include "rif/rifw.hpp"
#include "rif/tensor.hpp"

namespace rif {

using FeatureVector = std::vector<float>;

inline constexpr float kBatchNormEpsilon = 1e-5f;

struct Conv1dParams {
  std::size_t kernel_size = 1;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  /// kernel_size x in_channels x out_channels, row-major.
  std::vector<float> weights;
  std::vector<float> bias;

  Conv1dParams() = default;
  Conv1dParams(std::size_t k, std::size_t in, std::size_t out)
      : kernel_size(k), in_channels(in), out_channels(out), weights(k * in * out, 0.0f), bias(out, 0.0f) {}

  float& w(std::size_t tap, std::size_t c, std::size_t o) {
    return weights[(tap * in_channels + c) * out_channels + o];
  }

  void validate() const;
};

/// Compositional convolution block: kernel-3 and kernel-5 branches,
/// concatenated (k3 first), fused by a kernel-1 convolution, then ELU and
/// inference-mode batch normalization.
struct CcbParams {
  Conv1dParams conv3;
  Conv1dParams conv5;
  Conv1dParams fuse;
  std::vector<float> bn_gamma;
  std::vector<float> bn_beta;
  std::vector<float> bn_mean;
  std::vector<float> bn_var;

  CcbParams() = default;
  /// Branch width is out/2, so the concatenation is `out` wide. BN starts as
  /// the identity.
  CcbParams(std::size_t in, std::size_t out);

  std::size_t in_channels() const { return conv3.in_channels; }
  std::size_t out_channels() const { return fuse.out_channels; }
  void validate() const;
};

/// Dense layer y = x W + b with W stored in_features x out_features.
struct DenseParams {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  DenseParams() = default;
  DenseParams(std::size_t in, std::size_t out)
      : in_features(in), out_features(out), weights(in * out, 0.0f), bias(out, 0.0f) {}
};

inline constexpr std::array<std::size_t, 5> kStage1Widths = {3, 64, 128, 256, 512};
inline constexpr std::array<std::size_t, 6> kStage2Widths = {3, 64, 128, 256, 512, 1024};
inline constexpr std::size_t kMlpHidden = 256;
inline constexpr std::size_t kCtfNetDim = 1024;

struct CtfNetParams {
  std::vector<CcbParams> stage1;  // 3 -> 512
  std::array<DenseParams, 2> mlp;  // 512 -> 256 -> 9
  std::vector<CcbParams> stage2;  // 3 -> 1024

  /// Architecture with zero convolutions and identity BN.
  static CtfNetParams zeros();

  std::size_t parameter_count() const;
  void validate() const;
};

float elu(float x);

/// out[i][o] = bias[o] + sum_{tap, c} x[i + tap - k/2][c] * w[tap][c][o]; rows
/// outside the input read as zero. Accumulation is in ascending tap, then
/// ascending channel order.
Tensor2 conv1d(const Tensor2& x, const Conv1dParams& p);

Tensor2 ccb_forward(const Tensor2& x, const CcbParams& p);

/// Per-channel maximum over rows.
std::vector<float> max_over_rows(const Tensor2& x);

/// Four CCBs and a max-pool: n x 3 -> 512.
std::vector<float> ctf_stage1(const Tensor2& points, const CtfNetParams& p);

/// The learned 3x3 transform, M = reshape(mlp(v)) + I (row-major).
std::array<float, 9> transform_matrix(const std::vector<float>& v, const CtfNetParams& p);

/// points * M.
Tensor2 apply_transform(const Tensor2& points, const std::vector<float>& v, const CtfNetParams& p);

/// Five CCBs and a max-pool: n x 3 -> 1024.
FeatureVector ctf_stage2(const Tensor2& points, const CtfNetParams& p);

/// Full network on center-relative group coordinates.
FeatureVector ctf_extract(const PointCloud& local_points, const CtfNetParams& p);

Tensor2 to_tensor(const PointCloud& points);

/// Glorot-uniform weights from the SplitMix64 stream in field declaration
/// order; biases zero, BN identity, last MLP layer all zero.
CtfNetParams init_weights(std::uint64_t seed);

std::vector<NamedTensor> to_named_tensors(const CtfNetParams& p);
/// Throws ShapeError on a missing tensor or mismatched dims.
CtfNetParams from_named_tensors(const std::vector<NamedTensor>& tensors);

void save_weights(const CtfNetParams& p, const std::filesystem::path& path);
CtfNetParams load_weights(const std::filesystem::path& path);

}  // namespace rif
