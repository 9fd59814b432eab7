#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rif {

/// Row-major float32 matrix: rows are points, columns are channels.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), data(r * c, fill) {}

  float& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<float> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const float> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

}  // namespace rif
