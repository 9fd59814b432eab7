#pragma once

// RIFW tensor container, all fields little-endian:
//
//   0..3   magic "RIFW"
//   4..7   u32 version (= 1)
//   8..11  u32 tensor count
//   per tensor:
//     u16 name length, UTF-8 name bytes
//     u8 rank, rank x u32 dims
//     prod(dims) x f32 values
//
// A zero-rank tensor holds exactly one value.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rif {

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

inline constexpr std::uint32_t kRifwVersion = 1;

std::vector<std::uint8_t> encode_rifw(std::span<const NamedTensor> tensors);

/// Throws BadMagic, UnsupportedFormat (version), TruncatedData, or ShapeError
/// when a declared shape does not fit the payload rules.
std::vector<NamedTensor> decode_rifw(std::span<const std::uint8_t> bytes);

void write_rifw(const std::filesystem::path& path, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> read_rifw(const std::filesystem::path& path);

/// Whole-file helpers shared by the binary readers.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace rif
