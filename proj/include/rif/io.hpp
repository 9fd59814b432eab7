#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rif/bank.hpp"
#include "rif/point.hpp"

namespace rif {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// One point per line, three whitespace-separated numbers. Blank lines and
/// lines starting with '#' are skipped.
PointCloud parse_xyz(std::string_view text);
std::string to_xyz(const PointCloud& cloud);

/// PLY subset: `ascii 1.0` and `binary_little_endian 1.0`; the x, y, z
/// properties of element `vertex` as float/double (any other scalar
/// property or element is skipped, list properties only outside `vertex`).
PointCloud parse_ply(std::span<const std::uint8_t> bytes);

enum class PlyEncoding { Ascii, BinaryLittleEndian };
/// x, y, z written as double.
std::vector<std::uint8_t> to_ply(const PointCloud& cloud, PlyEncoding encoding);

/// Dispatches on extension: .ply or anything else as XYZ text.
PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

struct GroundTruth {
  std::vector<std::uint8_t> labels;
  /// Empty when no line carries a second column; 0 means background.
  std::vector<std::int64_t> region_ids;
};

/// One label (0 or 1) per line with an optional integer region id.
GroundTruth parse_labels(std::string_view text);
GroundTruth read_labels(const std::filesystem::path& path);
std::string to_labels(const GroundTruth& gt);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// CSV `point_index,score,is_center` plus sidecar `path` + ".json" holding
/// the object score and `config`.
void write_scores(const ScoreReport& report, const std::filesystem::path& path,
                  const nlohmann::ordered_json& config = nlohmann::ordered_json::object());
std::string scores_csv(const ScoreReport& report);

/// Reads back what write_scores produced. Center scores are recovered from
/// the rows flagged as centers, in point order.
struct ScoreFile {
  std::vector<double> per_point_scores;
  std::vector<std::size_t> center_indices;
  double object_score = 0.0;
  nlohmann::ordered_json config;
};
ScoreFile read_scores(const std::filesystem::path& path);

}  // namespace rif
