#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rif/io.hpp"
#include "rif/point.hpp"
#include "rif/rng.hpp"

namespace rif {

enum class DefectKind { Bump, Dent, Crater };

std::string to_string(DefectKind kind);

struct DefectParams {
  double height = 0.08;        // bump / dent peak, crater rim peak
  double radius = 0.2;         // affected radius around the defect center
  double crater_radius = 0.15; // points closer than this are removed
};

struct SyntheticSpec {
  std::size_t categories = 1;
  std::size_t train = 4;
  std::size_t test_normal = 5;
  std::size_t test_defect = 5;
  std::size_t points = 2048;
  /// By default every file of a category is a posed copy of one surface
  /// sample, so normal clouds differ from each other only by pose. When set,
  /// each file draws its own surface sample instead.
  bool resample_per_file = false;
  DefectParams defect;
};

enum class BaseShape { Sphere, Cube };

/// Surface samples with their outward normals.
struct SurfaceSample {
  PointCloud points;
  PointCloud normals;
};

/// Unit sphere (radius 1) or unit cube surface (side 1), both centered at
/// the origin. Draws 8n points uniformly by area, then keeps n of them by
/// farthest point sampling, which gives the even spacing of a scanned part.
SurfaceSample sample_surface(BaseShape shape, std::size_t n, RngStream& rng);

/// Rotation drawn uniformly from SO(3) (normalized Gaussian quaternion).
Mat3 random_rotation(RngStream& rng);

struct DefectResult {
  PointCloud cloud;
  GroundTruth truth;
};

/// Applies one defect around a randomly chosen surface point. Bumps and
/// dents push points within `radius` along their normals by a Gaussian
/// profile (sigma = radius / 2); a crater removes points within
/// `crater_radius` and raises the rim out to `radius` linearly. Every
/// displaced point is labeled 1 with region id 1.
DefectResult apply_defect(const SurfaceSample& surface, BaseShape shape, DefectKind kind, const DefectParams& params,
                          RngStream& rng);

struct GeneratedFile {
  std::filesystem::path cloud;
  std::filesystem::path gt;  // empty for training files
};

/// Writes <out>/<category>/{train,test,gt}. Each category first draws its
/// base surface sample; then every file gets its own stream derived from
/// (seed, stream number), a random rotation and a translation in [-1, 1]^3.
/// Categories alternate sphere, cube. Output is a pure function of
/// (seed, spec).
std::vector<GeneratedFile> gen_synthetic(std::uint64_t seed, const SyntheticSpec& spec,
                                         const std::filesystem::path& out);

}  // namespace rif
