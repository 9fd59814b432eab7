#include "rif/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "rif/dataset.hpp"
#include "rif/error.hpp"
#include "rif/geometry.hpp"
#include "rif/io.hpp"
#include "rif/parallel.hpp"
#include "rif/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace rif {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T v{};
  ss >> v;
  if (!ss || !(ss >> std::ws).eof()) throw InvalidConfig("bad value '" + value + "' for " + key);
  return v;
}

// Registers the options shared by every pipeline command. The caller applies
// them on top of the config file after parsing.
struct PipelineFlags {
  std::string config_path;
  std::size_t groups = 0;
  std::size_t group_size = 0;
  std::string extractor;
  std::string weights;
  std::uint64_t seed = 0;
  double fpr_cap = 0.0;
  std::size_t threads = 0;
  CLI::Option* groups_opt = nullptr;
  CLI::Option* size_opt = nullptr;
  CLI::Option* extractor_opt = nullptr;
  CLI::Option* weights_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* cap_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "TOML-style config file; flags override it");
    groups_opt = app->add_option("-G,--groups", groups, "FPS centers per cloud (default 512)");
    size_opt = app->add_option("-K,--group-size", group_size, "points per group (default 512)");
    extractor_opt = app->add_option("--extractor", extractor, "ctfnet | baseline");
    weights_opt = app->add_option("--weights", weights, "RIFW weights; default init_weights(seed)");
    seed_opt = app->add_option("--seed", seed, "seed for weights and augmentation (default 0)");
    cap_opt = app->add_option("--fpr-cap", fpr_cap, "AUPRO integration limit (default 0.3)");
    threads_opt = app->add_option("--threads", threads, "worker threads; 0 = RI3D_THREADS or all cores");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_text(cfg, read_text(config_path));
    if (*groups_opt) cfg.group_count = groups;
    if (*size_opt) cfg.group_size = group_size;
    if (*extractor_opt) cfg.extractor = extractor;
    if (*weights_opt) cfg.weights = weights;
    if (*seed_opt) cfg.seed = seed;
    if (*cap_opt) cfg.fpr_cap = fpr_cap;
    if (*threads_opt) cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

// Coordinates that are zero up to round-off print as 0 so that rotated
// copies of a cloud produce identical text.
std::string format_mapped(double v, double scale) {
  if (std::abs(v) <= 1e-12 * scale) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

int cmd_pcm(const fs::path& in, const fs::path& out_path, std::ostream& out) {
  const PointCloud cloud = read_cloud(in);
  const MappedCloud mapped = pcm_map(cloud);
  const double scale = cloud_scale(mapped.cloud, Point3{});
  std::string text;
  for (const auto& p : mapped.cloud)
    text += format_mapped(p.x, scale) + ' ' + format_mapped(p.y, scale) + ' ' + format_mapped(p.z, scale) + '\n';
  if (out_path.extension() == ".ply") {
    std::string header = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(mapped.cloud.size()) +
                         "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    write_text(out_path, header + text);
  } else {
    write_text(out_path, text);
  }
  const auto& f = mapped.frame;
  out << "centroid " << format_double(f.centroid.x) << ' ' << format_double(f.centroid.y) << ' '
      << format_double(f.centroid.z) << '\n';
  for (std::size_t r = 0; r < 3; ++r)
    out << 'e' << r + 1 << ' ' << format_double(f.basis[r][0]) << ' ' << format_double(f.basis[r][1]) << ' '
        << format_double(f.basis[r][2]) << '\n';
  out << "key_indices " << mapped.keys.index[0] << ' ' << mapped.keys.index[1] << ' ' << mapped.keys.index[2] << '\n';
  out << "determinant " << format_double(determinant(f.basis)) << '\n';
  return kExitOk;
}

int cmd_augment(const fs::path& in, const fs::path& out_path, const RunConfig& cfg, std::ostream& out) {
  RngStream rng(cfg.seed);
  const PointCloud cloud = s3da(read_cloud(in), rng, cfg.s3da);
  write_cloud(out_path, cloud);
  out << "augmented " << cloud.size() << " points\n";
  return kExitOk;
}

MemoryBank bank_from_dataset(const CategoryLayout& category, const FeatureExtractor& extractor, const RunConfig& cfg) {
  return build_bank(load_train(category), extractor, cfg.pipeline());
}

int cmd_build_bank(const fs::path& dataset, const std::string& category, const fs::path& out_path,
                   const RunConfig& cfg, std::ostream& out) {
  const auto layout = scan_dataset(dataset);
  const auto& cat = layout.category(category);
  const auto extractor = make_extractor(cfg);
  const MemoryBank bank = bank_from_dataset(cat, *extractor, cfg);
  save_bank(bank, out_path);
  json info;
  info["category"] = cat.name;
  info["train_samples"] = cat.train.size();
  info["bank_count"] = bank.size();
  info["dim"] = bank.dim();
  info["config"] = cfg.to_json();
  write_text(fs::path(out_path.string() + ".json"), info.dump(2) + "\n");
  out << "bank " << bank.size() << " vectors of dimension " << bank.dim() << " -> " << out_path.string() << '\n';
  return kExitOk;
}

int cmd_score(const fs::path& bank_path, const fs::path& cloud_path, const fs::path& out_path, const RunConfig& cfg,
              std::ostream& out) {
  const MemoryBank bank = load_bank(bank_path);
  const auto extractor = make_extractor(cfg);
  const ScoreReport report = score_sample(bank, read_cloud(cloud_path), *extractor, cfg.pipeline());
  write_scores(report, out_path, cfg.to_json());
  out << "object_score " << format_double(report.object_score) << '\n';
  return kExitOk;
}

json evaluate_dataset(const fs::path& dataset, const std::string& category, const std::optional<fs::path>& bank_path,
                      const RunConfig& cfg) {
  const auto layout = scan_dataset(dataset);
  const auto& cat = layout.category(category);
  const auto extractor = make_extractor(cfg);
  const MemoryBank bank = bank_path ? load_bank(*bank_path) : bank_from_dataset(cat, *extractor, cfg);
  if (bank.dim() != extractor->dim())
    throw ShapeError("bank dimension " + std::to_string(bank.dim()) + " does not match extractor dimension " +
                     std::to_string(extractor->dim()));

  const auto tests = load_test(cat);
  std::vector<EvalSample> samples;
  json per_sample = json::array();
  for (const auto& t : tests) {
    const ScoreReport r = score_sample(bank, t.cloud, *extractor, cfg.pipeline());
    EvalSample s;
    s.cloud = t.cloud;
    s.point_scores = r.per_point_scores;
    s.object_score = r.object_score;
    s.labels = t.truth.labels;
    s.region_ids = t.truth.region_ids;
    const bool anomalous = std::any_of(s.labels.begin(), s.labels.end(), [](auto l) { return l != 0; });
    per_sample.push_back(json{{"stem", t.stem}, {"anomalous", anomalous}, {"object_score", r.object_score}});
    samples.push_back(std::move(s));
  }
  const MetricReport metrics = evaluate(samples, cfg.fpr_cap);
  json report = metrics.to_json();
  report["category"] = cat.name;
  report["bank_count"] = bank.size();
  report["test_samples"] = tests.size();
  report["config"] = cfg.to_json();
  report["samples"] = per_sample;
  return report;
}

int cmd_evaluate(const fs::path& dataset, const std::string& category, const std::optional<fs::path>& bank_path,
                 const fs::path& out_path, const RunConfig& cfg, std::ostream& out) {
  const json report = evaluate_dataset(dataset, category, bank_path, cfg);
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return kExitOk;
  }
  write_text(out_path, text);
  auto show = [](const json& v) { return v.is_null() ? std::string("undefined") : format_double(v.get<double>()); };
  out << "P-AUROC " << show(report["P-AUROC"]) << "  O-AUROC " << show(report["O-AUROC"]) << "  P-AUPRO "
      << show(report["P-AUPRO"]) << "  O-AUPRO " << show(report["O-AUPRO"]) << '\n';
  return kExitOk;
}

int cmd_bench(const fs::path& dataset, const std::string& category, const fs::path& out_path, const RunConfig& cfg,
              std::ostream& out) {
  using clock = std::chrono::steady_clock;
  const auto layout = scan_dataset(dataset);
  const auto& cat = layout.category(category);
  const auto extractor = make_extractor(cfg);
  const PipelineConfig pc = cfg.pipeline();
  std::map<std::string, double> stage{{"pcm", 0}, {"fps", 0}, {"knn", 0}, {"extract", 0}, {"score", 0}};
  auto timed = [&](const char* name, auto&& fn) {
    const auto t0 = clock::now();
    fn();
    stage[name] += std::chrono::duration<double>(clock::now() - t0).count();
  };

  // Pipeline run stage by stage so each stage can be timed separately.
  auto features_of = [&](const PointCloud& cloud) {
    SampleFeatures f;
    std::vector<Group> groups;
    timed("pcm", [&] { f.mapped = pcm_map(cloud); });
    timed("fps", [&] { f.centers = farthest_point_sample(f.mapped.cloud, pc.group_count); });
    timed("knn", [&] { groups = extract_groups(f.mapped.cloud, f.centers, pc.group_size, pc.threads); });
    timed("extract", [&] {
      f.features.resize(groups.size());
      parallel_for(groups.size(), pc.threads, [&](std::size_t i) { f.features[i] = extractor->extract(groups[i]); });
    });
    return f;
  };

  const auto train = load_train(cat);
  MemoryBank bank(extractor->dim());
  for (std::size_t s = 0; s < train.size(); ++s) {
    const auto f = features_of(train[s]);
    for (std::size_t i = 0; i < f.centers.size(); ++i) bank.append(f.features[i], {s, f.centers[i]});
  }
  const auto tests = load_test(cat);
  const auto t0 = clock::now();
  for (const auto& t : tests) {
    const auto f = features_of(t.cloud);
    timed("score", [&] { score_features(bank, f, pc.threads); });
  }
  const double test_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  json report;
  report["category"] = cat.name;
  report["train_samples"] = train.size();
  report["test_samples"] = tests.size();
  json stages;
  for (const char* name : {"pcm", "fps", "knn", "extract", "score"}) stages[name] = stage[name];
  report["stage_seconds"] = stages;
  report["test_seconds"] = test_seconds;
  report["samples_per_second"] = test_seconds > 0 ? static_cast<double>(tests.size()) / test_seconds : 0.0;
  report["bank_count"] = bank.size();
  report["bank_dim"] = bank.dim();
  report["bank_memory_bytes"] = bank.memory_bytes();
  report["threads"] = pc.threads == 0 ? default_thread_count() : pc.threads;
  report["config"] = cfg.to_json();
  const std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) write_text(out_path, text);
  out << text;
  return kExitOk;
}

int cmd_gen_synthetic(std::uint64_t seed, const SyntheticSpec& spec, const fs::path& out_dir, std::ostream& out) {
  const auto files = gen_synthetic(seed, spec, out_dir);
  std::size_t gt = 0;
  for (const auto& f : files) gt += !f.gt.empty();
  out << "wrote " << files.size() << " clouds and " << gt << " ground-truth files under " << out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  if (group_count == 0) throw InvalidConfig("G must be >= 1");
  if (group_size == 0) throw InvalidConfig("K must be >= 1");
  if (extractor != "ctfnet" && extractor != "baseline")
    throw InvalidConfig("unknown extractor '" + extractor + "' (ctfnet | baseline)");
  if (!(fpr_cap > 0.0) || !(fpr_cap <= 1.0)) throw InvalidConfig("fpr_cap must be in (0, 1]");
  s3da.validate();
}

PipelineConfig RunConfig::pipeline() const { return {group_count, group_size, threads}; }

json RunConfig::to_json() const {
  json j;
  j["G"] = group_count;
  j["K"] = group_size;
  j["extractor"] = extractor;
  j["weights"] = weights ? json(weights->string()) : json("init_weights(seed)");
  j["seed"] = seed;
  j["fpr_cap"] = fpr_cap;
  j["s3da"] = json{{"scale_low", s3da.scale_low},
                   {"scale_high", s3da.scale_high},
                   {"jitter_sigma", s3da.jitter_sigma},
                   {"jitter_clip", s3da.jitter_clip},
                   {"zero_fraction", s3da.zero_fraction}};
  return j;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);

    if (key == "G" || key == "groups")
      cfg.group_count = parse_value<std::size_t>(key, value);
    else if (key == "K" || key == "group_size")
      cfg.group_size = parse_value<std::size_t>(key, value);
    else if (key == "extractor")
      cfg.extractor = value;
    else if (key == "weights")
      cfg.weights = value.empty() ? std::nullopt : std::optional<fs::path>(value);
    else if (key == "seed")
      cfg.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "fpr_cap")
      cfg.fpr_cap = parse_value<double>(key, value);
    else if (key == "threads")
      cfg.threads = parse_value<std::size_t>(key, value);
    else if (key == "scale_low")
      cfg.s3da.scale_low = parse_value<double>(key, value);
    else if (key == "scale_high")
      cfg.s3da.scale_high = parse_value<double>(key, value);
    else if (key == "jitter_sigma")
      cfg.s3da.jitter_sigma = parse_value<double>(key, value);
    else if (key == "jitter_clip")
      cfg.s3da.jitter_clip = parse_value<double>(key, value);
    else if (key == "zero_fraction")
      cfg.s3da.zero_fraction = parse_value<double>(key, value);
    else
      throw InvalidConfig("unknown config key '" + key + "'");
  }
}

std::unique_ptr<FeatureExtractor> make_extractor(const RunConfig& cfg) {
  if (cfg.extractor == "baseline") return std::make_unique<BaselineExtractor>();
  if (cfg.extractor == "ctfnet")
    return std::make_unique<CtfNetExtractor>(cfg.weights ? load_weights(*cfg.weights) : init_weights(cfg.seed));
  throw InvalidConfig("unknown extractor '" + cfg.extractor + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotation-invariant point-cloud anomaly detection"};
  app.require_subcommand(1);

  std::string in, out_path, dataset, category, bank_path, cloud_path;

  auto* pcm = app.add_subcommand("pcm", "Canonicalize a cloud; prints the frame and its determinant");
  pcm->add_option("--in", in, "input cloud (.xyz or .ply)")->required();
  pcm->add_option("--out", out_path, "output cloud")->required();

  PipelineFlags aug_flags;
  S3daConfig s3da_flags;
  auto* augment = app.add_subcommand("augment", "Apply scale / jitter / zero-mask augmentation");
  augment->add_option("--in", in)->required();
  augment->add_option("--out", out_path)->required();
  aug_flags.add_to(augment);
  auto* lo = augment->add_option("--scale-low", s3da_flags.scale_low);
  auto* hi = augment->add_option("--scale-high", s3da_flags.scale_high);
  auto* sig = augment->add_option("--jitter-sigma", s3da_flags.jitter_sigma);
  auto* clip = augment->add_option("--jitter-clip", s3da_flags.jitter_clip);
  auto* zero = augment->add_option("--zero-fraction", s3da_flags.zero_fraction);

  PipelineFlags bank_flags;
  auto* build = app.add_subcommand("build-bank", "Build the memory bank from a category's train split");
  build->add_option("--dataset", dataset)->required();
  build->add_option("--category", category);
  build->add_option("--out", out_path)->required();
  bank_flags.add_to(build);

  PipelineFlags score_flags;
  auto* score = app.add_subcommand("score", "Score one cloud against a bank");
  score->add_option("--bank", bank_path)->required();
  score->add_option("--cloud", cloud_path)->required();
  score->add_option("--out", out_path, "score CSV; a .json sidecar is written next to it")->required();
  score_flags.add_to(score);

  PipelineFlags eval_flags;
  auto* eval = app.add_subcommand("evaluate", "Score a test split and compute AUROC / AUPRO");
  eval->add_option("--dataset", dataset)->required();
  eval->add_option("--category", category);
  eval->add_option("--bank", bank_path, "prebuilt bank; built from train when omitted");
  eval->add_option("--out", out_path, "report JSON (stdout when omitted)");
  eval_flags.add_to(eval);

  PipelineFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Per-stage timings and bank memory estimate");
  bench->add_option("--dataset", dataset)->required();
  bench->add_option("--category", category);
  bench->add_option("--out", out_path);
  bench_flags.add_to(bench);

  std::uint64_t gen_seed = 0;
  SyntheticSpec spec;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic defect dataset");
  gen->add_option("--seed", gen_seed, "base seed (default 0)");
  gen->add_option("--out", out_path, "output root")->required();
  gen->add_option("--categories", spec.categories, "categories, alternating sphere and cube (default 1)");
  gen->add_option("--train", spec.train, "training clouds per category (default 4)");
  gen->add_option("--test-normal", spec.test_normal, "normal test clouds per category (default 5)");
  gen->add_option("--test-defect", spec.test_defect, "defective test clouds per category (default 5)");
  gen->add_option("--points", spec.points, "points per cloud (default 2048)");
  gen->add_flag("--resample-per-file", spec.resample_per_file, "draw a fresh surface sample for every file");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      // Subcommand help arrives as CallForHelp from the subcommand.
      err << e.what() << '\n';
      return kExitInvalidInput;
    }

    if (*pcm) return cmd_pcm(in, out_path, out);
    if (*augment) {
      RunConfig cfg = aug_flags.resolve();
      if (*lo) cfg.s3da.scale_low = s3da_flags.scale_low;
      if (*hi) cfg.s3da.scale_high = s3da_flags.scale_high;
      if (*sig) cfg.s3da.jitter_sigma = s3da_flags.jitter_sigma;
      if (*clip) cfg.s3da.jitter_clip = s3da_flags.jitter_clip;
      if (*zero) cfg.s3da.zero_fraction = s3da_flags.zero_fraction;
      cfg.validate();
      return cmd_augment(in, out_path, cfg, out);
    }
    if (*build) return cmd_build_bank(dataset, category, out_path, bank_flags.resolve(), out);
    if (*score) return cmd_score(bank_path, cloud_path, out_path, score_flags.resolve(), out);
    if (*eval) {
      std::optional<fs::path> bank;
      if (!bank_path.empty()) bank = bank_path;
      return cmd_evaluate(dataset, category, bank, out_path, eval_flags.resolve(), out);
    }
    if (*bench) return cmd_bench(dataset, category, out_path, bench_flags.resolve(), out);
    if (*gen) return cmd_gen_synthetic(gen_seed, spec, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_input_error() ? kExitInvalidInput : kExitInternal;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace rif
