#include "rif/dataset.hpp"

#include <algorithm>

#include "rif/error.hpp"

namespace fs = std::filesystem;

namespace rif {
namespace {

bool is_cloud_file(const fs::path& p) {
  const auto ext = p.extension();
  return ext == ".xyz" || ext == ".ply";
}

std::vector<fs::path> list_clouds(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_cloud_file(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

void check_unique_stems(const std::vector<fs::path>& files, const fs::path& dir) {
  std::vector<std::string> stems;
  for (const auto& f : files) stems.push_back(f.stem().string());
  std::sort(stems.begin(), stems.end());
  const auto dup = std::adjacent_find(stems.begin(), stems.end());
  if (dup != stems.end()) throw InvalidConfig("duplicate stem '" + *dup + "' in " + dir.string());
}

CategoryLayout scan_category(const fs::path& dir) {
  CategoryLayout c;
  c.name = dir.filename().string();
  c.dir = dir;
  c.train = list_clouds(dir / "train");
  c.test = list_clouds(dir / "test");
  check_unique_stems(c.train, dir / "train");
  check_unique_stems(c.test, dir / "test");
  if (fs::is_directory(dir / "gt"))
    for (const auto& entry : fs::directory_iterator(dir / "gt"))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        c.gt[entry.path().stem().string()] = entry.path();
  return c;
}

bool looks_like_category(const fs::path& dir) {
  return fs::is_directory(dir / "train") || fs::is_directory(dir / "test");
}

}  // namespace

const CategoryLayout& DatasetLayout::category(const std::string& name) const {
  if (name.empty()) {
    if (categories.size() != 1)
      throw InvalidConfig("dataset has " + std::to_string(categories.size()) + " categories; pass --category");
    return categories.front();
  }
  for (const auto& c : categories)
    if (c.name == name) return c;
  throw InvalidConfig("no category '" + name + "' under " + root.string());
}

DatasetLayout scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw InvalidConfig("dataset directory " + root.string() + " does not exist");
  DatasetLayout layout;
  layout.root = root;
  if (looks_like_category(root)) {
    layout.categories.push_back(scan_category(root));
    return layout;
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && looks_like_category(entry.path())) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) layout.categories.push_back(scan_category(d));
  if (layout.categories.empty()) throw InvalidConfig("no categories found under " + root.string());
  return layout;
}

std::vector<PointCloud> load_train(const CategoryLayout& category) {
  if (category.train.empty())
    throw InvalidConfig("category '" + category.name + "' has no training clouds in " +
                        (category.dir / "train").string());
  std::vector<PointCloud> clouds;
  for (const auto& f : category.train) clouds.push_back(read_cloud(f));
  return clouds;
}

std::vector<TestSample> load_test(const CategoryLayout& category) {
  if (category.test.empty())
    throw InvalidConfig("category '" + category.name + "' has no test clouds in " + (category.dir / "test").string());
  std::vector<TestSample> samples;
  for (const auto& f : category.test) {
    TestSample s;
    s.stem = f.stem().string();
    s.cloud = read_cloud(f);
    const auto it = category.gt.find(s.stem);
    if (it != category.gt.end()) {
      s.truth = read_labels(it->second);
    } else {
      s.truth.labels.assign(s.cloud.size(), 0);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace rif
