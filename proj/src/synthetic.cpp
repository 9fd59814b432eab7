#include "rif/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "rif/error.hpp"
#include "rif/sampling.hpp"

namespace fs = std::filesystem;

namespace rif {
namespace {

// Uniform candidates per output point before farthest-point thinning.
constexpr std::size_t kOversample = 8;

constexpr std::array<DefectKind, 3> kDefectCycle = {DefectKind::Bump, DefectKind::Dent, DefectKind::Crater};

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return prefix + "_" + buf;
}

std::string category_name(std::size_t c) {
  const std::string base = c % 2 == 0 ? "sphere" : "cube";
  return c < 2 ? base : base + std::to_string(c / 2);
}

// Defect centers on the cube stay far enough from the edges that the whole
// defect lies on one face.
bool valid_defect_center(BaseShape shape, const Point3& p, double radius) {
  if (shape == BaseShape::Sphere) return true;
  int on_face = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    if (std::abs(std::abs(p[a]) - 0.5) < 1e-12) {
      ++on_face;
    } else if (std::abs(p[a]) > 0.5 - radius) {
      return false;
    }
  }
  return on_face == 1;
}

}  // namespace

std::string to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::Bump:
      return "bump";
    case DefectKind::Dent:
      return "dent";
    case DefectKind::Crater:
      return "crater";
  }
  return "unknown";
}

SurfaceSample sample_surface(BaseShape shape, std::size_t n, RngStream& rng) {
  SurfaceSample s;
  const std::size_t pool = n * kOversample;
  s.points.reserve(pool);
  s.normals.reserve(pool);
  while (s.points.size() < pool) {
    if (shape == BaseShape::Sphere) {
      const Point3 g{rng.gaussian(), rng.gaussian(), rng.gaussian()};
      const double len = norm(g);
      if (len < 1e-12) continue;
      s.points.push_back(g / len);
      s.normals.push_back(g / len);
    } else {
      const auto face = rng.below(6);
      const double u = rng.uniform(-0.5, 0.5);
      const double v = rng.uniform(-0.5, 0.5);
      const double side = face % 2 == 0 ? -0.5 : 0.5;
      Point3 p;
      Point3 normal;
      switch (face / 2) {
        case 0:
          p = {side, u, v};
          normal = {2 * side, 0, 0};
          break;
        case 1:
          p = {u, side, v};
          normal = {0, 2 * side, 0};
          break;
        default:
          p = {u, v, side};
          normal = {0, 0, 2 * side};
          break;
      }
      s.points.push_back(p);
      s.normals.push_back(normal);
    }
  }
  SurfaceSample thinned;
  thinned.points.reserve(n);
  thinned.normals.reserve(n);
  for (const std::size_t i : farthest_point_sample(s.points, n)) {
    thinned.points.push_back(s.points[i]);
    thinned.normals.push_back(s.normals[i]);
  }
  return thinned;
}

Mat3 random_rotation(RngStream& rng) {
  double w, x, y, z, len;
  do {
    w = rng.gaussian();
    x = rng.gaussian();
    y = rng.gaussian();
    z = rng.gaussian();
    len = std::sqrt(w * w + x * x + y * y + z * z);
  } while (len < 1e-12);
  w /= len;
  x /= len;
  y /= len;
  z /= len;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

DefectResult apply_defect(const SurfaceSample& surface, BaseShape shape, DefectKind kind, const DefectParams& params,
                          RngStream& rng) {
  const std::size_t n = surface.points.size();
  if (n == 0) throw EmptyCloud();
  std::size_t center = 0;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt > 100000) throw InvalidConfig("no valid defect center on the surface");
    center = static_cast<std::size_t>(rng.below(n));
    if (valid_defect_center(shape, surface.points[center], params.radius)) break;
  }
  const Point3 origin = surface.points[center];
  const double sigma = params.radius / 2.0;

  DefectResult out;
  out.cloud.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = surface.points[i];
    const double d = distance(p, origin);
    double push = 0.0;
    bool labeled = false;
    if (d < params.radius) {
      switch (kind) {
        case DefectKind::Bump:
        case DefectKind::Dent: {
          const double mag = params.height * std::exp(-d * d / (2 * sigma * sigma));
          push = kind == DefectKind::Bump ? mag : -mag;
          labeled = true;
          break;
        }
        case DefectKind::Crater:
          if (d < params.crater_radius) continue;
          push = params.height * (params.radius - d) / (params.radius - params.crater_radius);
          labeled = true;
          break;
      }
    }
    out.cloud.push_back(p + push * surface.normals[i]);
    out.truth.labels.push_back(labeled ? 1 : 0);
    out.truth.region_ids.push_back(labeled ? 1 : 0);
  }
  return out;
}

std::vector<GeneratedFile> gen_synthetic(std::uint64_t seed, const SyntheticSpec& spec, const fs::path& out) {
  if (spec.points < 3) throw InvalidConfig("synthetic clouds need at least 3 points");
  std::vector<GeneratedFile> files;
  std::uint64_t file_no = 0;

  for (std::size_t c = 0; c < spec.categories; ++c) {
    const BaseShape shape = c % 2 == 0 ? BaseShape::Sphere : BaseShape::Cube;
    const fs::path dir = out / category_name(c);
    fs::create_directories(dir / "train");
    fs::create_directories(dir / "test");
    fs::create_directories(dir / "gt");

    RngStream base_rng(derive_seed(seed, file_no++));
    const SurfaceSample base = sample_surface(shape, spec.points, base_rng);
    auto surface_for = [&](RngStream& rng) {
      return spec.resample_per_file ? sample_surface(shape, spec.points, rng) : base;
    };

    auto place = [&](RngStream& rng, const PointCloud& cloud) {
      const Mat3 rot = random_rotation(rng);
      const Point3 t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      return rigid_transform(cloud, rot, t);
    };

    for (std::size_t i = 0; i < spec.train; ++i) {
      RngStream rng(derive_seed(seed, file_no++));
      const auto surface = surface_for(rng);
      GeneratedFile f{dir / "train" / (numbered("train", i) + ".xyz"), {}};
      write_cloud(f.cloud, place(rng, surface.points));
      files.push_back(f);
    }
    for (std::size_t i = 0; i < spec.test_normal; ++i) {
      RngStream rng(derive_seed(seed, file_no++));
      const auto surface = surface_for(rng);
      const std::string stem = numbered("good", i);
      GeneratedFile f{dir / "test" / (stem + ".xyz"), dir / "gt" / (stem + ".txt")};
      write_cloud(f.cloud, place(rng, surface.points));
      GroundTruth gt;
      gt.labels.assign(surface.points.size(), 0);
      write_text(f.gt, to_labels(gt));
      files.push_back(f);
    }
    for (std::size_t i = 0; i < spec.test_defect; ++i) {
      RngStream rng(derive_seed(seed, file_no++));
      const DefectKind kind = kDefectCycle[i % kDefectCycle.size()];
      const auto surface = surface_for(rng);
      const auto defect = apply_defect(surface, shape, kind, spec.defect, rng);
      const std::string stem = numbered(to_string(kind), i);
      GeneratedFile f{dir / "test" / (stem + ".xyz"), dir / "gt" / (stem + ".txt")};
      write_cloud(f.cloud, place(rng, defect.cloud));
      write_text(f.gt, to_labels(defect.truth));
      files.push_back(f);
    }
  }
  return files;
}

}  // namespace rif
