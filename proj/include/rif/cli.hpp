#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rif/augment.hpp"
#include "rif/bank.hpp"
#include "rif/extractor.hpp"
#include "rif/metrics.hpp"

namespace rif {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalidInput = 2;

struct RunConfig {
  std::size_t group_count = 512;
  std::size_t group_size = 512;
  std::string extractor = "ctfnet";
  std::optional<std::filesystem::path> weights;
  std::uint64_t seed = 0;
  double fpr_cap = kDefaultFprCap;
  S3daConfig s3da;
  /// 0 means RI3D_THREADS or all cores.
  std::size_t threads = 0;

  void validate() const;
  PipelineConfig pipeline() const;
  /// Effective values, minus the thread count (which never changes results).
  nlohmann::ordered_json to_json() const;
};

/// `key = value` lines, '#' comments, optional quotes around strings;
/// `[section]` headers are accepted and ignored. Throws InvalidConfig on an
/// unknown key or bad value.
void apply_config_text(RunConfig& cfg, const std::string& text);

std::unique_ptr<FeatureExtractor> make_extractor(const RunConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rif
