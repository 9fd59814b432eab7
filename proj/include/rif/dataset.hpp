#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rif/io.hpp"

namespace rif {

/// <root>/<category>/{train,test,gt}/. Clouds are .xyz or .ply; ground
/// truth for test/<stem>.* lives at gt/<stem>.txt. A test cloud without a
/// gt file is all-normal.
struct CategoryLayout {
  std::string name;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> test;
  std::map<std::string, std::filesystem::path> gt;
};

struct DatasetLayout {
  std::filesystem::path root;
  std::vector<CategoryLayout> categories;

  /// By name; an empty name selects the only category. Throws InvalidConfig.
  const CategoryLayout& category(const std::string& name) const;
};

/// `root` may itself be a category directory (containing train/ or test/).
DatasetLayout scan_dataset(const std::filesystem::path& root);

struct TestSample {
  std::string stem;
  PointCloud cloud;
  GroundTruth truth;
};

std::vector<PointCloud> load_train(const CategoryLayout& category);
std::vector<TestSample> load_test(const CategoryLayout& category);

}  // namespace rif
