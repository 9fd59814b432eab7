#include "rif/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "rif/error.hpp"
#include "rif/rifw.hpp"

namespace rif {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

double parse_coordinate(std::string_view token, std::size_t line_no) {
  double v = 0.0;
  if (!parse_number(token, v)) throw ParseError(line_no, "not a number: '" + std::string(token) + "'");
  if (!std::isfinite(v)) throw ParseError(line_no, "non-finite coordinate");
  return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

struct PlyProperty {
  std::string type;
  std::string name;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_type_size(const std::string& t) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"int8", 1},   {"uchar", 1},  {"uint8", 1},   {"short", 2},   {"int16", 2},
      {"ushort", 2}, {"uint16", 2}, {"int", 4},    {"int32", 4},   {"uint", 4},    {"uint32", 4},
      {"float", 4},  {"float32", 4}, {"double", 8}, {"float64", 8}};
  const auto it = sizes.find(t);
  if (it == sizes.end()) throw UnsupportedFormat("PLY property type '" + t + "'");
  return it->second;
}

double read_binary_scalar(const std::uint8_t* p, const std::string& t) {
  auto load = [p](auto v) {
    std::memcpy(&v, p, sizeof(v));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return load(std::int8_t{});
  if (t == "uchar" || t == "uint8") return load(std::uint8_t{});
  if (t == "short" || t == "int16") return load(std::int16_t{});
  if (t == "ushort" || t == "uint16") return load(std::uint16_t{});
  if (t == "int" || t == "int32") return load(std::int32_t{});
  if (t == "uint" || t == "uint32") return load(std::uint32_t{});
  if (t == "float" || t == "float32") return load(float{});
  return load(double{});
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

PointCloud parse_xyz(std::string_view text) {
  PointCloud cloud;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') return;
    if (tokens.size() != 3)
      throw ParseError(line_no, "expected 3 columns, got " + std::to_string(tokens.size()));
    cloud.push_back({parse_coordinate(tokens[0], line_no), parse_coordinate(tokens[1], line_no),
                     parse_coordinate(tokens[2], line_no)});
  });
  return cloud;
}

std::string to_xyz(const PointCloud& cloud) {
  std::string out;
  for (const auto& p : cloud) {
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += ' ';
    out += format_double(p.z);
    out += '\n';
  }
  return out;
}

PointCloud parse_ply(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= bytes.size()) throw TruncatedData("PLY header ends before end_header");
    std::size_t end = pos;
    while (end < bytes.size() && bytes[end] != '\n') ++end;
    std::string line(reinterpret_cast<const char*>(bytes.data() + pos), end - pos);
    pos = end < bytes.size() ? end + 1 : end;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (bytes.size() < 3 || std::memcmp(bytes.data(), "ply", 3) != 0) throw BadMagic("missing 'ply' magic");
  if (next_line() != "ply") throw BadMagic("first line must be exactly 'ply'");

  std::optional<PlyEncoding> encoding;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string line = next_line();
    std::vector<std::string_view> tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[2] != "1.0") throw UnsupportedFormat("PLY format line '" + line + "'");
      if (tok[1] == "ascii")
        encoding = PlyEncoding::Ascii;
      else if (tok[1] == "binary_little_endian")
        encoding = PlyEncoding::BinaryLittleEndian;
      else
        throw UnsupportedFormat("PLY encoding '" + std::string(tok[1]) + "'");
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError(line_no, "malformed element line");
      PlyElement e;
      e.name = tok[1];
      if (!parse_number(tok[2], e.count)) throw ParseError(line_no, "bad element count");
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError(line_no, "property before any element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop = {std::string(tok[3]), std::string(tok[4]), true, std::string(tok[2])};
        ply_type_size(prop.count_type);
      } else if (tok.size() == 3) {
        prop = {std::string(tok[1]), std::string(tok[2]), false, {}};
      } else {
        throw ParseError(line_no, "malformed property line");
      }
      ply_type_size(prop.type);
      elements.back().properties.push_back(std::move(prop));
    } else {
      throw ParseError(line_no, "unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!encoding) throw ParseError("PLY header has no format line");

  const PlyElement* vertex = nullptr;
  for (const auto& e : elements)
    if (e.name == "vertex") vertex = &e;
  if (!vertex) throw ParseError("PLY has no vertex element");
  std::array<int, 3> xyz_slot = {-1, -1, -1};
  for (std::size_t i = 0; i < vertex->properties.size(); ++i) {
    const auto& prop = vertex->properties[i];
    const int axis = prop.name == "x" ? 0 : prop.name == "y" ? 1 : prop.name == "z" ? 2 : -1;
    if (axis < 0) continue;
    if (prop.is_list || (prop.type != "float" && prop.type != "float32" && prop.type != "double" &&
                         prop.type != "float64"))
      throw UnsupportedFormat("vertex coordinate '" + prop.name + "' must be float or double");
    xyz_slot[static_cast<std::size_t>(axis)] = static_cast<int>(i);
  }
  for (int s : xyz_slot)
    if (s < 0) throw ParseError("PLY vertex element lacks x, y or z");

  PointCloud cloud;
  cloud.reserve(vertex->count);
  if (*encoding == PlyEncoding::Ascii) {
    // Values flow across lines freely, so read a token stream.
    std::string_view body(reinterpret_cast<const char*>(bytes.data() + pos), bytes.size() - pos);
    std::size_t cursor = 0;
    auto next_token = [&]() -> std::string_view {
      while (cursor < body.size() && std::isspace(static_cast<unsigned char>(body[cursor]))) ++cursor;
      if (cursor >= body.size()) throw TruncatedData("PLY ascii body ends early");
      const std::size_t start = cursor;
      while (cursor < body.size() && !std::isspace(static_cast<unsigned char>(body[cursor]))) ++cursor;
      return body.substr(start, cursor - start);
    };
    auto number = [&](std::string_view t) {
      double v = 0.0;
      if (!parse_number(t, v)) throw ParseError("PLY ascii value '" + std::string(t) + "' is not a number");
      return v;
    };
    for (const auto& e : elements) {
      for (std::size_t r = 0; r < e.count; ++r) {
        std::array<double, 3> p{};
        for (std::size_t i = 0; i < e.properties.size(); ++i) {
          const auto& prop = e.properties[i];
          if (prop.is_list) {
            const double n = number(next_token());
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) next_token();
            continue;
          }
          const double v = number(next_token());
          if (&e == vertex)
            for (std::size_t a = 0; a < 3; ++a)
              if (xyz_slot[a] == static_cast<int>(i)) p[a] = v;
        }
        if (&e == vertex) {
          const Point3 pt{p[0], p[1], p[2]};
          if (!pt.finite()) throw ParseError("PLY vertex " + std::to_string(r) + " is not finite");
          cloud.push_back(pt);
        }
      }
      if (&e == vertex) break;
    }
  } else {
    for (const auto& e : elements) {
      for (std::size_t r = 0; r < e.count; ++r) {
        std::array<double, 3> p{};
        for (std::size_t i = 0; i < e.properties.size(); ++i) {
          const auto& prop = e.properties[i];
          if (prop.is_list) {
            const std::size_t cs = ply_type_size(prop.count_type);
            if (bytes.size() - pos < cs) throw TruncatedData("PLY binary body ends early");
            const auto n = static_cast<std::size_t>(read_binary_scalar(bytes.data() + pos, prop.count_type));
            pos += cs;
            const std::size_t skip = n * ply_type_size(prop.type);
            if (bytes.size() - pos < skip) throw TruncatedData("PLY binary body ends early");
            pos += skip;
            continue;
          }
          const std::size_t sz = ply_type_size(prop.type);
          if (bytes.size() - pos < sz) throw TruncatedData("PLY binary body ends early");
          if (&e == vertex)
            for (std::size_t a = 0; a < 3; ++a)
              if (xyz_slot[a] == static_cast<int>(i)) p[a] = read_binary_scalar(bytes.data() + pos, prop.type);
          pos += sz;
        }
        if (&e == vertex) {
          const Point3 pt{p[0], p[1], p[2]};
          if (!pt.finite()) throw ParseError("PLY vertex " + std::to_string(r) + " is not finite");
          cloud.push_back(pt);
        }
      }
      if (&e == vertex) break;
    }
  }
  return cloud;
}

std::vector<std::uint8_t> to_ply(const PointCloud& cloud, PlyEncoding encoding) {
  std::string header = "ply\nformat ";
  header += encoding == PlyEncoding::Ascii ? "ascii" : "binary_little_endian";
  header += " 1.0\nelement vertex " + std::to_string(cloud.size()) +
            "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  if (encoding == PlyEncoding::Ascii) {
    const std::string body = to_xyz(cloud);
    out.insert(out.end(), body.begin(), body.end());
  } else {
    for (const auto& p : cloud) {
      for (double v : {p.x, p.y, p.z}) {
        const auto* b = reinterpret_cast<const std::uint8_t*>(&v);
        out.insert(out.end(), b, b + sizeof(double));
      }
    }
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PointCloud read_cloud(const std::filesystem::path& path) {
  if (path.extension() == ".ply") return parse_ply(read_file_bytes(path));
  return parse_xyz(read_text(path));
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  if (path.extension() == ".ply")
    write_file_bytes(path, to_ply(cloud, PlyEncoding::Ascii));
  else
    write_text(path, to_xyz(cloud));
}

GroundTruth parse_labels(std::string_view text) {
  GroundTruth gt;
  std::vector<std::int64_t> ids;
  bool any_region = false;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') return;
    if (tokens.size() > 2) throw ParseError(line_no, "expected label and optional region id");
    int label = 0;
    if (!parse_number(tokens[0], label) || (label != 0 && label != 1))
      throw ParseError(line_no, "label must be 0 or 1, got '" + std::string(tokens[0]) + "'");
    std::int64_t region = 0;
    if (tokens.size() == 2) {
      if (!parse_number(tokens[1], region) || region < 0)
        throw ParseError(line_no, "region id must be a non-negative integer");
      if (region > 0 && label == 0) throw ParseError(line_no, "region id on a normal point");
      any_region = true;
    }
    gt.labels.push_back(static_cast<std::uint8_t>(label));
    ids.push_back(region);
  });
  if (any_region) gt.region_ids = std::move(ids);
  return gt;
}

GroundTruth read_labels(const std::filesystem::path& path) { return parse_labels(read_text(path)); }

std::string to_labels(const GroundTruth& gt) {
  std::string out;
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    out += gt.labels[i] ? '1' : '0';
    if (!gt.region_ids.empty()) out += ' ' + std::to_string(gt.region_ids[i]);
    out += '\n';
  }
  return out;
}

std::string scores_csv(const ScoreReport& report) {
  std::vector<char> is_center(report.per_point_scores.size(), 0);
  for (auto c : report.center_indices)
    if (c < is_center.size()) is_center[c] = 1;
  std::string out = "point_index,score,is_center\n";
  for (std::size_t i = 0; i < report.per_point_scores.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(report.per_point_scores[i]) + ',' + (is_center[i] ? '1' : '0') +
           '\n';
  }
  return out;
}

void write_scores(const ScoreReport& report, const std::filesystem::path& path,
                  const nlohmann::ordered_json& config) {
  write_text(path, scores_csv(report));
  nlohmann::ordered_json side;
  side["object_score"] = report.object_score;
  side["center_count"] = report.center_indices.size();
  side["point_count"] = report.per_point_scores.size();
  side["config"] = config;
  write_text(std::filesystem::path(path.string() + ".json"), side.dump(2) + "\n");
}

ScoreFile read_scores(const std::filesystem::path& path) {
  ScoreFile f;
  const std::string text = read_text(path);
  bool header = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    if (header) {
      if (line != "point_index,score,is_center") throw ParseError(line_no, "unexpected score file header");
      header = false;
      return;
    }
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cols.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    std::size_t idx = 0;
    double score = 0.0;
    int center = 0;
    if (cols.size() != 3 || !parse_number(cols[0], idx) || !parse_number(cols[1], score) ||
        !parse_number(cols[2], center) || idx != f.per_point_scores.size())
      throw ParseError(line_no, "malformed score row");
    f.per_point_scores.push_back(score);
    if (center) f.center_indices.push_back(idx);
  });
  if (header) throw ParseError("score file is empty");
  const auto side = nlohmann::ordered_json::parse(read_text(std::filesystem::path(path.string() + ".json")));
  f.object_score = side.at("object_score").get<double>();
  f.config = side.at("config");
  return f;
}

}  // namespace rif
