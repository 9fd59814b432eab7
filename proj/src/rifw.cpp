#include "rif/rifw.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "rif/error.hpp"

namespace rif {
namespace {

static_assert(std::endian::native == std::endian::little, "RIFW I/O assumes a little-endian host");

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw TruncatedData(std::string("RIFW ") + what);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t NamedTensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > std::numeric_limits<std::size_t>::max() / sizeof(float) / d)
      return std::numeric_limits<std::size_t>::max() / sizeof(float);
    n *= d;
  }
  return n;
}

std::vector<std::uint8_t> encode_rifw(std::span<const NamedTensor> tensors) {
  std::vector<std::uint8_t> out = {'R', 'I', 'F', 'W'};
  put<std::uint32_t>(out, kRifwVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max())
      throw ShapeError("tensor name too long: " + t.name.substr(0, 32));
    if (t.dims.size() > std::numeric_limits<std::uint8_t>::max())
      throw ShapeError("tensor rank too large: " + t.name);
    if (t.values.size() != t.element_count())
      throw ShapeError("tensor " + t.name + " holds " + std::to_string(t.values.size()) +
                       " values, dims imply " + std::to_string(t.element_count()));
    put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) put<std::uint32_t>(out, d);
    const auto* p = reinterpret_cast<const std::uint8_t*>(t.values.data());
    out.insert(out.end(), p, p + t.values.size() * sizeof(float));
  }
  return out;
}

std::vector<NamedTensor> decode_rifw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "RIFW", 4) != 0)
    throw BadMagic("expected RIFW container");
  Reader in(bytes.subspan(4));
  const auto version = in.get<std::uint32_t>("version");
  if (version != kRifwVersion)
    throw UnsupportedFormat("RIFW version " + std::to_string(version));
  const auto count = in.get<std::uint32_t>("tensor count");

  std::vector<NamedTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto name_len = in.get<std::uint16_t>("name length");
    const auto name = in.take(name_len, "name");
    t.name.assign(name.begin(), name.end());
    const auto rank = in.get<std::uint8_t>("rank");
    for (std::uint8_t r = 0; r < rank; ++r) t.dims.push_back(in.get<std::uint32_t>("dims"));
    const std::size_t n = t.element_count();
    const auto payload = in.take(n * sizeof(float), "tensor values");
    t.values.resize(n);
    if (n > 0) std::memcpy(t.values.data(), payload.data(), payload.size());
    tensors.push_back(std::move(t));
  }
  return tensors;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_rifw(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
  write_file_bytes(path, encode_rifw(tensors));
}

std::vector<NamedTensor> read_rifw(const std::filesystem::path& path) {
  return decode_rifw(read_file_bytes(path));
}

}  // namespace rif
