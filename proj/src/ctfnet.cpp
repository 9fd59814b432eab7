#include "rif/ctfnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <string>

#include "rif/error.hpp"
#include "rif/rng.hpp"

namespace rif {
namespace {

constexpr std::size_t kTileRows = 8;
constexpr std::size_t kLanes = 16;
constexpr std::size_t kTileVecs = 3;
constexpr std::size_t kTileCols = kLanes * kTileVecs;

using LaneVec = float __attribute__((vector_size(kLanes * sizeof(float))));

inline LaneVec load_lanes(const float* p) {
  LaneVec v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

inline void store_lanes(float* p, LaneVec v) { std::memcpy(p, &v, sizeof(v)); }

struct ConvView {
  const float* padded;   // (rows + 2 * half) x in, plus tail rows
  const float* weights;  // kernel x in x out_stride
  float* y;              // tile_rows x out_stride, preloaded with the bias
  std::size_t in;
  std::size_t out_stride;
  std::size_t kernel;
};

// An 8 x 48 output tile in registers. Products accumulate in ascending
// (tap, channel) order, and every element of the output goes through this
// same instruction sequence.
inline void conv_tile(const ConvView& v, std::size_t r0, std::size_t o0) {
  LaneVec acc[kTileRows][kTileVecs];
  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t j = 0; j < kTileVecs; ++j) acc[r][j] = load_lanes(v.y + (r0 + r) * v.out_stride + o0 + j * kLanes);
  for (std::size_t tap = 0; tap < v.kernel; ++tap) {
    const float* xrow = v.padded + (r0 + tap) * v.in;
    const float* wtap = v.weights + tap * v.in * v.out_stride + o0;
    for (std::size_t c = 0; c < v.in; ++c) {
      const float* w = wtap + c * v.out_stride;
      LaneVec wv[kTileVecs];
      for (std::size_t j = 0; j < kTileVecs; ++j) wv[j] = load_lanes(w + j * kLanes);
      for (std::size_t r = 0; r < kTileRows; ++r) {
        const float xv = xrow[r * v.in + c];
        for (std::size_t j = 0; j < kTileVecs; ++j) acc[r][j] += xv * wv[j];
      }
    }
  }
  for (std::size_t r = 0; r < kTileRows; ++r)
    for (std::size_t j = 0; j < kTileVecs; ++j) store_lanes(v.y + (r0 + r) * v.out_stride + o0 + j * kLanes, acc[r][j]);
}

std::string dims_string(const std::vector<std::uint32_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + "]";
}

std::vector<CcbParams> make_stage(std::span<const std::size_t> widths) {
  std::vector<CcbParams> stage;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) stage.emplace_back(widths[i], widths[i + 1]);
  return stage;
}

void fill_uniform(std::vector<float>& w, RngStream& rng, double fan_in, double fan_out) {
  const double s = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : w) v = static_cast<float>(rng.uniform(-s, s));
}

void init_conv(Conv1dParams& c, RngStream& rng) {
  fill_uniform(c.weights, rng, static_cast<double>(c.kernel_size * c.in_channels),
               static_cast<double>(c.kernel_size * c.out_channels));
}

void init_stage(std::vector<CcbParams>& stage, RngStream& rng) {
  for (auto& ccb : stage) {
    init_conv(ccb.conv3, rng);
    init_conv(ccb.conv5, rng);
    init_conv(ccb.fuse, rng);
  }
}

std::vector<float> dense_forward(const std::vector<float>& x, const DenseParams& d) {
  if (x.size() != d.in_features)
    throw ShapeError("dense input has " + std::to_string(x.size()) + " features, expected " +
                     std::to_string(d.in_features));
  std::vector<float> y = d.bias;
  for (std::size_t i = 0; i < d.in_features; ++i) {
    const float xv = x[i];
    const float* w = d.weights.data() + i * d.out_features;
    for (std::size_t o = 0; o < d.out_features; ++o) y[o] += xv * w[o];
  }
  return y;
}

Tensor2 run_stage(Tensor2 x, const std::vector<CcbParams>& stage) {
  for (const auto& ccb : stage) x = ccb_forward(x, ccb);
  return x;
}

// Tensor naming shared by save and load.
template <typename Params, typename Visitor>
void visit_tensors(Params& p, Visitor&& visit) {
  auto conv = [&](const std::string& prefix, auto& c) {
    visit(prefix + ".w", std::vector<std::uint32_t>{static_cast<std::uint32_t>(c.kernel_size),
                                                    static_cast<std::uint32_t>(c.in_channels),
                                                    static_cast<std::uint32_t>(c.out_channels)},
          c.weights);
    visit(prefix + ".b", std::vector<std::uint32_t>{static_cast<std::uint32_t>(c.out_channels)}, c.bias);
  };
  auto stage = [&](const std::string& prefix, auto& ccbs) {
    for (std::size_t i = 0; i < ccbs.size(); ++i) {
      auto& b = ccbs[i];
      const std::string base = prefix + ".ccb" + std::to_string(i);
      conv(base + ".conv3", b.conv3);
      conv(base + ".conv5", b.conv5);
      conv(base + ".fuse", b.fuse);
      const std::vector<std::uint32_t> dim{static_cast<std::uint32_t>(b.out_channels())};
      visit(base + ".bn.gamma", dim, b.bn_gamma);
      visit(base + ".bn.beta", dim, b.bn_beta);
      visit(base + ".bn.mean", dim, b.bn_mean);
      visit(base + ".bn.var", dim, b.bn_var);
    }
  };
  stage("s1", p.stage1);
  for (std::size_t i = 0; i < p.mlp.size(); ++i) {
    auto& d = p.mlp[i];
    const std::string base = "mlp." + std::to_string(i);
    visit(base + ".w", std::vector<std::uint32_t>{static_cast<std::uint32_t>(d.in_features),
                                                  static_cast<std::uint32_t>(d.out_features)},
          d.weights);
    visit(base + ".b", std::vector<std::uint32_t>{static_cast<std::uint32_t>(d.out_features)}, d.bias);
  }
  stage("s2", p.stage2);
}

}  // namespace

void Conv1dParams::validate() const {
  if (kernel_size != 1 && kernel_size != 3 && kernel_size != 5)
    throw ShapeError("conv kernel size must be 1, 3 or 5, got " + std::to_string(kernel_size));
  if (weights.size() != kernel_size * in_channels * out_channels || bias.size() != out_channels)
    throw ShapeError("conv parameter lengths do not match declared shape");
}

CcbParams::CcbParams(std::size_t in, std::size_t out)
    : conv3(3, in, out / 2),
      conv5(5, in, out / 2),
      fuse(1, 2 * (out / 2), out),
      bn_gamma(out, 1.0f),
      bn_beta(out, 0.0f),
      bn_mean(out, 0.0f),
      bn_var(out, 1.0f) {}

void CcbParams::validate() const {
  conv3.validate();
  conv5.validate();
  fuse.validate();
  if (conv3.kernel_size != 3 || conv5.kernel_size != 5 || fuse.kernel_size != 1)
    throw ShapeError("CCB kernel sizes must be 3, 5 and 1");
  if (conv3.in_channels != conv5.in_channels || conv3.out_channels != conv5.out_channels ||
      fuse.in_channels != conv3.out_channels + conv5.out_channels)
    throw ShapeError("CCB branch widths are inconsistent");
  const std::size_t c = fuse.out_channels;
  if (bn_gamma.size() != c || bn_beta.size() != c || bn_mean.size() != c || bn_var.size() != c)
    throw ShapeError("CCB batch-norm lengths do not match output width");
}

CtfNetParams CtfNetParams::zeros() {
  CtfNetParams p;
  p.stage1 = make_stage(kStage1Widths);
  p.mlp = {DenseParams(kStage1Widths.back(), kMlpHidden), DenseParams(kMlpHidden, 9)};
  p.stage2 = make_stage(kStage2Widths);
  return p;
}

std::size_t CtfNetParams::parameter_count() const {
  std::size_t n = 0;
  auto count = [&](const std::string&, const std::vector<std::uint32_t>&, const std::vector<float>& v) {
    n += v.size();
  };
  visit_tensors(*this, count);
  return n;
}

void CtfNetParams::validate() const {
  if (stage1.size() != kStage1Widths.size() - 1 || stage2.size() != kStage2Widths.size() - 1)
    throw ShapeError("unexpected CCB count");
  for (std::size_t i = 0; i < stage1.size(); ++i) {
    stage1[i].validate();
    if (stage1[i].in_channels() != kStage1Widths[i] || stage1[i].out_channels() != kStage1Widths[i + 1])
      throw ShapeError("stage 1 CCB " + std::to_string(i) + " has the wrong width");
  }
  for (std::size_t i = 0; i < stage2.size(); ++i) {
    stage2[i].validate();
    if (stage2[i].in_channels() != kStage2Widths[i] || stage2[i].out_channels() != kStage2Widths[i + 1])
      throw ShapeError("stage 2 CCB " + std::to_string(i) + " has the wrong width");
  }
  if (mlp[0].in_features != kStage1Widths.back() || mlp[0].out_features != mlp[1].in_features ||
      mlp[1].out_features != 9)
    throw ShapeError("MLP must map 512 -> hidden -> 9");
}

float elu(float x) { return x > 0.0f ? x : std::expm1(x); }

Tensor2 conv1d(const Tensor2& x, const Conv1dParams& p) {
  if (x.cols != p.in_channels)
    throw ShapeError("conv1d input has " + std::to_string(x.cols) + " channels, expected " +
                     std::to_string(p.in_channels));
  p.validate();
  const std::size_t rows = x.rows;
  const std::size_t in = p.in_channels;
  const std::size_t out = p.out_channels;
  const std::size_t half = p.kernel_size / 2;
  const std::size_t tile_rows = (rows + kTileRows - 1) / kTileRows * kTileRows;
  const std::size_t stride = (out + kTileCols - 1) / kTileCols * kTileCols;

  // Zero rows above and below implement the "same" padding; extra rows at
  // the end fill the last tile and are discarded.
  std::vector<float> padded((tile_rows + 2 * half) * in, 0.0f);
  std::copy(x.data.begin(), x.data.end(), padded.begin() + static_cast<std::ptrdiff_t>(half * in));

  std::vector<float> wide;
  const float* weights = p.weights.data();
  if (stride != out) {
    wide.assign(p.kernel_size * in * stride, 0.0f);
    for (std::size_t row = 0; row < p.kernel_size * in; ++row)
      std::copy_n(p.weights.begin() + static_cast<std::ptrdiff_t>(row * out), out,
                  wide.begin() + static_cast<std::ptrdiff_t>(row * stride));
    weights = wide.data();
  }

  std::vector<float> acc(tile_rows * stride, 0.0f);
  for (std::size_t r = 0; r < tile_rows; ++r)
    std::copy(p.bias.begin(), p.bias.end(), acc.begin() + static_cast<std::ptrdiff_t>(r * stride));

  const ConvView view{padded.data(), weights, acc.data(), in, stride, p.kernel_size};
  for (std::size_t o0 = 0; o0 < stride; o0 += kTileCols)
    for (std::size_t r0 = 0; r0 < tile_rows; r0 += kTileRows) conv_tile(view, r0, o0);

  Tensor2 y(rows, out);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(acc.begin() + static_cast<std::ptrdiff_t>(r * stride), out, y.row(r).begin());
  return y;
}

Tensor2 ccb_forward(const Tensor2& x, const CcbParams& p) {
  const Tensor2 a = conv1d(x, p.conv3);
  const Tensor2 b = conv1d(x, p.conv5);
  Tensor2 cat(x.rows, a.cols + b.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto dst = cat.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols));
  }
  Tensor2 y = conv1d(cat, p.fuse);
  const std::size_t c = y.cols;
  if (p.bn_gamma.size() != c || p.bn_beta.size() != c || p.bn_mean.size() != c || p.bn_var.size() != c)
    throw ShapeError("CCB batch-norm lengths do not match output width");
  std::vector<float> denom(c);
  for (std::size_t o = 0; o < c; ++o) denom[o] = std::sqrt(p.bn_var[o] + kBatchNormEpsilon);
  for (std::size_t r = 0; r < y.rows; ++r) {
    auto row = y.row(r);
    for (std::size_t o = 0; o < c; ++o)
      row[o] = p.bn_gamma[o] * (elu(row[o]) - p.bn_mean[o]) / denom[o] + p.bn_beta[o];
  }
  return y;
}

std::vector<float> max_over_rows(const Tensor2& x) {
  if (x.rows == 0) throw ShapeError("max over an empty tensor");
  std::vector<float> m(x.row(0).begin(), x.row(0).end());
  for (std::size_t r = 1; r < x.rows; ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols; ++c) m[c] = std::max(m[c], row[c]);
  }
  return m;
}

std::vector<float> ctf_stage1(const Tensor2& points, const CtfNetParams& p) {
  if (points.cols != 3) throw ShapeError("stage 1 expects n x 3 input");
  return max_over_rows(run_stage(points, p.stage1));
}

std::array<float, 9> transform_matrix(const std::vector<float>& v, const CtfNetParams& p) {
  std::vector<float> hidden = dense_forward(v, p.mlp[0]);
  for (auto& h : hidden) h = elu(h);
  const std::vector<float> flat = dense_forward(hidden, p.mlp[1]);
  std::array<float, 9> m{};
  for (std::size_t i = 0; i < 9; ++i) m[i] = flat[i] + (i % 4 == 0 ? 1.0f : 0.0f);
  return m;
}

Tensor2 apply_transform(const Tensor2& points, const std::vector<float>& v, const CtfNetParams& p) {
  if (points.cols != 3) throw ShapeError("apply_transform expects n x 3 input");
  const auto m = transform_matrix(v, p);
  Tensor2 f(points.rows, 3);
  for (std::size_t r = 0; r < points.rows; ++r) {
    for (std::size_t j = 0; j < 3; ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < 3; ++k) acc += points(r, k) * m[k * 3 + j];
      f(r, j) = acc;
    }
  }
  return f;
}

FeatureVector ctf_stage2(const Tensor2& points, const CtfNetParams& p) {
  if (points.cols != 3) throw ShapeError("stage 2 expects n x 3 input");
  return max_over_rows(run_stage(points, p.stage2));
}

Tensor2 to_tensor(const PointCloud& points) {
  Tensor2 t(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    t(i, 0) = static_cast<float>(points[i].x);
    t(i, 1) = static_cast<float>(points[i].y);
    t(i, 2) = static_cast<float>(points[i].z);
  }
  return t;
}

FeatureVector ctf_extract(const PointCloud& local_points, const CtfNetParams& p) {
  if (local_points.empty()) throw ShapeError("cannot extract features from an empty group");
  const Tensor2 pts = to_tensor(local_points);
  return ctf_stage2(apply_transform(pts, ctf_stage1(pts, p), p), p);
}

CtfNetParams init_weights(std::uint64_t seed) {
  CtfNetParams p = CtfNetParams::zeros();
  RngStream rng(seed);
  init_stage(p.stage1, rng);
  fill_uniform(p.mlp[0].weights, rng, static_cast<double>(p.mlp[0].in_features),
               static_cast<double>(p.mlp[0].out_features));
  init_stage(p.stage2, rng);
  return p;
}

std::vector<NamedTensor> to_named_tensors(const CtfNetParams& p) {
  std::vector<NamedTensor> out;
  visit_tensors(p,
                [&](const std::string& name, std::vector<std::uint32_t> dims, const std::vector<float>& v) {
                  out.push_back({name, std::move(dims), v});
                });
  return out;
}

CtfNetParams from_named_tensors(const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;
  CtfNetParams p = CtfNetParams::zeros();
  visit_tensors(p, [&](const std::string& name, const std::vector<std::uint32_t>& dims,
                       std::vector<float>& dst) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ShapeError("missing tensor " + name);
    if (it->second->dims != dims)
      throw ShapeError("tensor " + name + " has dims " + dims_string(it->second->dims) + ", expected " +
                       dims_string(dims));
    dst = it->second->values;
  });
  return p;
}

void save_weights(const CtfNetParams& p, const std::filesystem::path& path) {
  write_rifw(path, to_named_tensors(p));
}

CtfNetParams load_weights(const std::filesystem::path& path) {
  return from_named_tensors(read_rifw(path));
}

}  // namespace rif
