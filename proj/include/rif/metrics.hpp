#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rif/point.hpp"

namespace rif {

inline constexpr double kDefaultFprCap = 0.3;

/// Area under the ROC curve as the normalized Mann-Whitney U statistic with
/// average ranks for ties. Labels are 0 (normal) or 1 (anomalous).
/// Throws UndefinedMetric unless both classes are present.
double auroc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

/// One test sample for per-region overlap.
struct ProSample {
  std::vector<double> scores;
  /// Point index sets, disjoint, non-empty.
  std::vector<std::vector<std::size_t>> regions;
  /// True for points that count toward the false-positive rate.
  std::vector<std::uint8_t> normal;
};

/// Thresholds sweep the distinct scores in descending order; a point is
/// predicted anomalous when its score is >= the threshold. At each step
/// FPR pools false positives over all normal points of all samples and PRO
/// is the mean per-region recall. The curve is extended horizontally to
/// FPR = 0 from its first point, integrated by trapezoids up to `fpr_cap`
/// and divided by `fpr_cap`.
/// Throws UndefinedMetric with no regions or no normal points.
double aupro(const std::vector<ProSample>& samples, double fpr_cap = kDefaultFprCap);

/// The (FPR, PRO) operating points of the sweep, before extension.
std::vector<std::pair<double, double>> pro_curve(const std::vector<ProSample>& samples);

/// Area under a monotone curve from 0 to `cap`, normalized, using the
/// conventions of aupro.
double normalized_partial_area(const std::vector<std::pair<double, double>>& curve, double cap);

/// Median nearest-neighbour distance among the points of a cloud.
double median_nn_spacing(const PointCloud& cloud);

/// Regions of a ground-truth mask. Points with a positive region id are
/// grouped by id. Remaining anomalous points form connected components of a
/// radius graph, radius = 2 x median nearest-neighbour spacing.
std::vector<std::vector<std::size_t>> build_regions(const PointCloud& cloud, const std::vector<std::uint8_t>& labels,
                                                    const std::vector<std::int64_t>& region_ids);

struct EvalSample {
  PointCloud cloud;
  std::vector<double> point_scores;
  double object_score = 0.0;
  std::vector<std::uint8_t> labels;
  /// Empty when the ground truth has no region column.
  std::vector<std::int64_t> region_ids;
};

struct MetricReport {
  std::optional<double> p_auroc;
  std::optional<double> o_auroc;
  std::optional<double> p_aupro;
  std::optional<double> o_aupro;
  double fpr_cap = kDefaultFprCap;

  /// Undefined metrics serialize as null; the integration and region rules
  /// are echoed alongside.
  nlohmann::ordered_json to_json() const;
};

inline constexpr const char* kRegionRule =
    "explicit region ids, else connected components of anomalous points within 2x median NN spacing";
inline constexpr const char* kObjectAuproRule = "partial AUROC over object scores up to fpr_cap, normalized";

/// Pixel metrics pool every point of every sample; object metrics use one
/// score and one label (any anomalous point) per sample. O-AUPRO is the
/// normalized partial AUROC at fpr_cap.
MetricReport evaluate(const std::vector<EvalSample>& samples, double fpr_cap = kDefaultFprCap);

}  // namespace rif
