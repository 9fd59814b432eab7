#include "rif/bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "rif/error.hpp"
#include "rif/parallel.hpp"
#include "rif/rifw.hpp"

namespace rif {

void MemoryBank::append(std::span<const float> feature, Provenance origin) {
  if (feature.size() != dim_)
    throw ShapeError("feature of dimension " + std::to_string(feature.size()) + " does not match bank dimension " +
                     std::to_string(dim_));
  data_.insert(data_.end(), feature.begin(), feature.end());
  provenance_.push_back(origin);
}

NearestNeighbor nn_distance(const MemoryBank& bank, std::span<const float> query) {
  if (bank.empty()) throw InvalidConfig("memory bank is empty");
  if (query.size() != bank.dim())
    throw ShapeError("query dimension " + std::to_string(query.size()) + " does not match bank dimension " +
                     std::to_string(bank.dim()));
  NearestNeighbor best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto v = bank.vector(i);
    double sq = 0.0;
    for (std::size_t d = 0; d < query.size(); ++d) {
      const double diff = static_cast<double>(v[d]) - static_cast<double>(query[d]);
      sq += diff * diff;
    }
    if (sq < best.distance) best = {sq, i};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

SampleFeatures compute_features(const PointCloud& cloud, const FeatureExtractor& extractor,
                                const PipelineConfig& cfg) {
  if (cfg.group_count == 0 || cfg.group_size == 0) throw InvalidConfig("G and K must be >= 1");
  SampleFeatures s;
  s.mapped = pcm_map(cloud);
  s.centers = farthest_point_sample(s.mapped.cloud, cfg.group_count);
  s.features.resize(s.centers.size());
  parallel_for(s.centers.size(), cfg.threads, [&](std::size_t i) {
    s.features[i] = extractor.extract(knn_group(s.mapped.cloud, s.centers[i], cfg.group_size));
  });
  return s;
}

MemoryBank build_bank(const std::vector<PointCloud>& train, const FeatureExtractor& extractor,
                      const PipelineConfig& cfg) {
  if (train.empty()) throw InvalidConfig("no training clouds");
  MemoryBank bank(extractor.dim());
  for (std::size_t s = 0; s < train.size(); ++s) {
    SampleFeatures f;
    try {
      f = compute_features(train[s], extractor, cfg);
    } catch (const DegenerateCloud& e) {
      throw DegenerateCloud("training sample " + std::to_string(s) + ": " + e.what());
    } catch (const NumericallyDegenerate& e) {
      throw NumericallyDegenerate("training sample " + std::to_string(s) + ": " + e.what());
    }
    for (std::size_t i = 0; i < f.centers.size(); ++i) bank.append(f.features[i], {s, f.centers[i]});
  }
  return bank;
}

std::vector<std::size_t> nearest_center(const PointCloud& cloud, const std::vector<std::size_t>& centers) {
  if (centers.empty()) throw InvalidConfig("no centers");
  std::vector<std::size_t> owner(cloud.size(), 0);
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double d = squared_distance(cloud[j], cloud[centers[c]]);
      if (d < best) {
        best = d;
        owner[j] = c;
      }
    }
  }
  return owner;
}

ScoreReport score_features(const MemoryBank& bank, const SampleFeatures& sample, std::size_t threads) {
  ScoreReport r;
  const std::size_t g = sample.centers.size();
  r.center_indices = sample.centers;
  r.center_scores.resize(g);
  r.nearest_bank_index.resize(g);
  parallel_for(g, threads, [&](std::size_t i) {
    const auto nn = nn_distance(bank, sample.features[i]);
    r.center_scores[i] = nn.distance;
    r.nearest_bank_index[i] = nn.index;
  });
  r.object_score = g == 0 ? 0.0 : *std::max_element(r.center_scores.begin(), r.center_scores.end());
  const auto owner = nearest_center(sample.mapped.cloud, sample.centers);
  r.per_point_scores.resize(owner.size());
  for (std::size_t j = 0; j < owner.size(); ++j) r.per_point_scores[j] = r.center_scores[owner[j]];
  return r;
}

ScoreReport score_sample(const MemoryBank& bank, const PointCloud& cloud, const FeatureExtractor& extractor,
                         const PipelineConfig& cfg) {
  if (bank.dim() != extractor.dim())
    throw ShapeError("bank dimension " + std::to_string(bank.dim()) + " does not match extractor " +
                     extractor.name() + " dimension " + std::to_string(extractor.dim()));
  return score_features(bank, compute_features(cloud, extractor, cfg), cfg.threads);
}

std::filesystem::path bank_meta_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.jsonl");
}

void save_bank(const MemoryBank& bank, const std::filesystem::path& path) {
  NamedTensor t{"bank.vectors",
                {static_cast<std::uint32_t>(bank.size()), static_cast<std::uint32_t>(bank.dim())},
                bank.data()};
  write_rifw(path, std::span<const NamedTensor>(&t, 1));
  std::ofstream meta(bank_meta_path(path), std::ios::trunc);
  if (!meta) throw IoError("cannot write " + bank_meta_path(path).string());
  for (const auto& p : bank.provenance()) {
    meta << nlohmann::json{{"sample_id", p.sample_id}, {"center_index", p.center_index}}.dump() << '\n';
  }
  if (!meta) throw IoError("write failed: " + bank_meta_path(path).string());
}

MemoryBank load_bank(const std::filesystem::path& path) {
  const auto tensors = read_rifw(path);
  const auto it = std::find_if(tensors.begin(), tensors.end(),
                               [](const NamedTensor& t) { return t.name == "bank.vectors"; });
  if (it == tensors.end()) throw ShapeError("bank file has no bank.vectors tensor");
  if (it->dims.size() != 2) throw ShapeError("bank.vectors must be rank 2");
  const std::size_t count = it->dims[0];
  const std::size_t dim = it->dims[1];

  std::ifstream meta(bank_meta_path(path));
  if (!meta) throw IoError("missing bank provenance file " + bank_meta_path(path).string());
  std::vector<Provenance> prov;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(meta, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      prov.push_back({j.at("sample_id").get<std::size_t>(), j.at("center_index").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("bank provenance: ") + e.what());
    }
  }
  if (prov.size() != count)
    throw ShapeError("bank provenance has " + std::to_string(prov.size()) + " rows for " + std::to_string(count) +
                     " vectors");

  MemoryBank bank(dim);
  for (std::size_t i = 0; i < count; ++i)
    bank.append(std::span<const float>(it->values.data() + i * dim, dim), prov[i]);
  return bank;
}

}  // namespace rif
