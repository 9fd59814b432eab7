#include "rif/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rif/error.hpp"

namespace rif {
namespace {

struct SweepEntry {
  double score;
  std::int64_t region;  // -1 when the point is not in a region
  bool normal;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::pair<double, double>> sweep(std::vector<SweepEntry> entries, const std::vector<std::size_t>& region_sizes,
                                             std::size_t normal_count) {
  if (region_sizes.empty()) throw UndefinedMetric("no anomalous regions");
  if (normal_count == 0) throw UndefinedMetric("no normal points, false-positive rate undefined");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) { return a.score > b.score; });

  // Integer tallies only; PRO is recomputed from the counts at each step.
  std::vector<std::size_t> hits(region_sizes.size(), 0);
  std::size_t false_pos = 0;
  std::vector<std::pair<double, double>> curve;
  std::size_t i = 0;
  while (i < entries.size()) {
    const double threshold = entries[i].score;
    for (; i < entries.size() && entries[i].score == threshold; ++i) {
      if (entries[i].region >= 0) ++hits[static_cast<std::size_t>(entries[i].region)];
      if (entries[i].normal) ++false_pos;
    }
    double pro = 0.0;
    for (std::size_t r = 0; r < hits.size(); ++r)
      pro += static_cast<double>(hits[r]) / static_cast<double>(region_sizes[r]);
    curve.emplace_back(static_cast<double>(false_pos) / static_cast<double>(normal_count),
                       pro / static_cast<double>(hits.size()));
  }
  return curve;
}

}  // namespace

double auroc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    throw ShapeError("auroc: " + std::to_string(scores.size()) + " scores vs " + std::to_string(labels.size()) +
                     " labels");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (auto l : labels) {
    if (l > 1) throw InvalidConfig("auroc: labels must be 0 or 1");
    positives += l;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw UndefinedMetric("auroc needs both normal and anomalous samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum keeps tie averages integral.
  std::uint64_t twice_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::size_t tied_pos = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) tied_pos += labels[order[j++]];
    // Ranks i+1 .. j, average (i + 1 + j) / 2.
    twice_rank_sum += tied_pos * static_cast<std::uint64_t>(i + 1 + j);
    i = j;
  }
  const std::uint64_t p = positives;
  const std::uint64_t twice_u = twice_rank_sum - p * (p + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(p) * static_cast<double>(negatives));
}

std::vector<std::pair<double, double>> pro_curve(const std::vector<ProSample>& samples) {
  std::vector<SweepEntry> entries;
  std::vector<std::size_t> region_sizes;
  std::size_t normal_count = 0;
  for (const auto& s : samples) {
    if (s.normal.size() != s.scores.size()) throw ShapeError("aupro: normal mask length differs from scores");
    std::vector<std::int64_t> region_of(s.scores.size(), -1);
    for (const auto& region : s.regions) {
      if (region.empty()) throw InvalidConfig("aupro: empty region");
      const auto id = static_cast<std::int64_t>(region_sizes.size());
      for (std::size_t idx : region) {
        if (idx >= s.scores.size()) throw ShapeError("aupro: region index out of range");
        if (region_of[idx] != -1) throw InvalidConfig("aupro: regions overlap");
        region_of[idx] = id;
      }
      region_sizes.push_back(region.size());
    }
    for (std::size_t j = 0; j < s.scores.size(); ++j) {
      entries.push_back({s.scores[j], region_of[j], s.normal[j] != 0});
      normal_count += s.normal[j] != 0;
    }
  }
  return sweep(std::move(entries), region_sizes, normal_count);
}

double normalized_partial_area(const std::vector<std::pair<double, double>>& curve, double cap) {
  if (!(cap > 0.0) || !(cap <= 1.0)) throw InvalidConfig("fpr_cap must be in (0, 1]");
  if (curve.empty()) throw UndefinedMetric("empty curve");
  double area = 0.0;
  double x0 = 0.0;
  double y0 = curve.front().second;
  for (const auto& [x1, y1] : curve) {
    if (x1 >= cap) {
      if (x1 > x0) area += 0.5 * (y0 + (y0 + (y1 - y0) * (cap - x0) / (x1 - x0))) * (cap - x0);
      x0 = cap;
      break;
    }
    area += 0.5 * (y0 + y1) * (x1 - x0);
    x0 = x1;
    y0 = y1;
  }
  // Curves end at FPR = 1, so this only triggers for a truncated input.
  if (x0 < cap) area += y0 * (cap - x0);
  return area / cap;
}

double aupro(const std::vector<ProSample>& samples, double fpr_cap) {
  return normalized_partial_area(pro_curve(samples), fpr_cap);
}

double median_nn_spacing(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cloud[a] < cloud[b]; });

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < n; ++a) {
    const Point3& p = cloud[order[a]];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = cloud[order[b]].x - p.x;
      if (dx * dx > best) break;
      best = std::min(best, squared_distance(p, cloud[order[b]]));
    }
    for (std::size_t b = a; b-- > 0;) {
      const double dx = p.x - cloud[order[b]].x;
      if (dx * dx > best) break;
      best = std::min(best, squared_distance(p, cloud[order[b]]));
    }
    nn[a] = std::sqrt(best);
  }
  std::sort(nn.begin(), nn.end());
  return n % 2 == 1 ? nn[n / 2] : 0.5 * (nn[n / 2 - 1] + nn[n / 2]);
}

std::vector<std::vector<std::size_t>> build_regions(const PointCloud& cloud, const std::vector<std::uint8_t>& labels,
                                                    const std::vector<std::int64_t>& region_ids) {
  if (labels.size() != cloud.size())
    throw ShapeError("ground truth has " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(cloud.size()) + " points");
  if (!region_ids.empty() && region_ids.size() != labels.size())
    throw ShapeError("region id column length differs from labels");

  std::map<std::int64_t, std::vector<std::size_t>> by_id;
  std::vector<std::size_t> loose;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    if (!region_ids.empty() && region_ids[i] > 0)
      by_id[region_ids[i]].push_back(i);
    else
      loose.push_back(i);
  }

  std::vector<std::vector<std::size_t>> regions;
  for (auto& [id, members] : by_id) regions.push_back(std::move(members));
  if (loose.empty()) return regions;

  const double radius = 2.0 * median_nn_spacing(cloud);
  const double r2 = radius * radius;
  DisjointSets sets(loose.size());
  for (std::size_t a = 0; a < loose.size(); ++a)
    for (std::size_t b = a + 1; b < loose.size(); ++b)
      if (squared_distance(cloud[loose[a]], cloud[loose[b]]) <= r2) sets.unite(a, b);

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t a = 0; a < loose.size(); ++a) components[sets.find(a)].push_back(loose[a]);
  for (auto& [root, members] : components) regions.push_back(std::move(members));
  return regions;
}

nlohmann::ordered_json MetricReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["P-AUROC"] = opt(p_auroc);
  j["O-AUROC"] = opt(o_auroc);
  j["P-AUPRO"] = opt(p_aupro);
  j["O-AUPRO"] = opt(o_aupro);
  j["fpr_cap"] = fpr_cap;
  j["region_rule"] = kRegionRule;
  j["o_aupro_rule"] = kObjectAuproRule;
  return j;
}

MetricReport evaluate(const std::vector<EvalSample>& samples, double fpr_cap) {
  MetricReport report;
  report.fpr_cap = fpr_cap;

  std::vector<double> pixel_scores;
  std::vector<std::uint8_t> pixel_labels;
  std::vector<double> object_scores;
  std::vector<std::uint8_t> object_labels;
  std::vector<ProSample> pro_samples;
  ProSample objects;

  for (const auto& s : samples) {
    if (s.point_scores.size() != s.labels.size() || s.cloud.size() != s.labels.size())
      throw ShapeError("sample has " + std::to_string(s.point_scores.size()) + " scores, " +
                       std::to_string(s.labels.size()) + " labels and " + std::to_string(s.cloud.size()) +
                       " points");
    pixel_scores.insert(pixel_scores.end(), s.point_scores.begin(), s.point_scores.end());
    pixel_labels.insert(pixel_labels.end(), s.labels.begin(), s.labels.end());
    const bool anomalous = std::any_of(s.labels.begin(), s.labels.end(), [](auto l) { return l != 0; });
    object_scores.push_back(s.object_score);
    object_labels.push_back(anomalous ? 1 : 0);

    ProSample ps;
    ps.scores = s.point_scores;
    ps.regions = build_regions(s.cloud, s.labels, s.region_ids);
    ps.normal.resize(s.labels.size());
    for (std::size_t i = 0; i < s.labels.size(); ++i) ps.normal[i] = s.labels[i] == 0;
    pro_samples.push_back(std::move(ps));

    if (anomalous) objects.regions.push_back({objects.scores.size()});
    objects.scores.push_back(s.object_score);
    objects.normal.push_back(anomalous ? 0 : 1);
  }

  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const UndefinedMetric&) {
      return std::nullopt;
    }
  };
  report.p_auroc = attempt([&] { return auroc(pixel_scores, pixel_labels); });
  report.o_auroc = attempt([&] { return auroc(object_scores, object_labels); });
  report.p_aupro = attempt([&] { return aupro(pro_samples, fpr_cap); });
  report.o_aupro = attempt([&] { return aupro({objects}, fpr_cap); });
  return report;
}

}  // namespace rif
