#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "meshdenoise/mesh.hpp"

namespace mdn {

enum class MeshFormat { Auto, Obj, PlyAscii, PlyBinary };

struct SaveOptions {
  // Significant digits for ASCII output; 17 round-trips doubles exactly.
  int ascii_precision = 17;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  // from_chars rejects a leading '+', which some exporters emit.
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long long& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Triangulates a polygon as a fan around its first corner.
inline void append_fan(std::vector<Face>& faces, const std::vector<Index>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
}

inline Mesh parse_obj(std::istream& in, const std::string& name) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(name + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string_view view(line.data(), hash == std::string::npos ? line.size() : hash);
    const auto tok = split_ws(view);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) fail("vertex record needs three coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!parse_double(tok[1 + k], p[k])) fail("bad coordinate '" + std::string(tok[1 + k]) + "'");
      }
      vertices.push_back(p);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) fail("face record needs at least three vertices");
      std::vector<Index> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view ref = tok[k].substr(0, tok[k].find('/'));
        long long idx = 0;
        if (!parse_long(ref, idx) || idx == 0) fail("bad face index '" + std::string(tok[k]) + "'");
        const long long n = static_cast<long long>(vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n) fail("face index " + std::to_string(idx) + " out of range");
        poly.push_back(static_cast<Index>(resolved));
      }
      append_fan(faces, poly);
    }
    // Normals, texture coordinates, groups and materials are ignored.
  }
  return Mesh(std::move(vertices), std::move(faces));
}

enum class PlyScalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline bool ply_scalar_from_name(const std::string& name, PlyScalar& out) {
  static const std::pair<const char*, PlyScalar> table[] = {
      {"char", PlyScalar::Int8},     {"int8", PlyScalar::Int8},       {"uchar", PlyScalar::UInt8},
      {"uint8", PlyScalar::UInt8},   {"short", PlyScalar::Int16},     {"int16", PlyScalar::Int16},
      {"ushort", PlyScalar::UInt16}, {"uint16", PlyScalar::UInt16},   {"int", PlyScalar::Int32},
      {"int32", PlyScalar::Int32},   {"uint", PlyScalar::UInt32},     {"uint32", PlyScalar::UInt32},
      {"float", PlyScalar::Float32}, {"float32", PlyScalar::Float32}, {"double", PlyScalar::Float64},
      {"float64", PlyScalar::Float64}};
  for (const auto& [n, t] : table) {
    if (name == n) {
      out = t;
      return true;
    }
  }
  return false;
}

inline std::size_t ply_scalar_size(PlyScalar t) {
  switch (t) {
    case PlyScalar::Int8:
    case PlyScalar::UInt8: return 1;
    case PlyScalar::Int16:
    case PlyScalar::UInt16: return 2;
    case PlyScalar::Int32:
    case PlyScalar::UInt32:
    case PlyScalar::Float32: return 4;
    case PlyScalar::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyScalar type = PlyScalar::Float32;
  bool is_list = false;
  PlyScalar count_type = PlyScalar::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Reads little-endian binary values from an in-memory buffer.
class ByteReader {
 public:
  ByteReader(const std::string& data, std::size_t offset, std::string name)
      : data_(data), pos_(offset), name_(std::move(name)) {}

  double read(PlyScalar t) {
    const std::size_t n = ply_scalar_size(t);
    if (pos_ + n > data_.size()) {
      throw FormatError(name_ + ": unexpected end of binary data at byte offset " + std::to_string(pos_));
    }
    unsigned char raw[8];
    std::memcpy(raw, data_.data() + pos_, n);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + n);
    pos_ += n;
    switch (t) {
      case PlyScalar::Int8: return static_cast<double>(static_cast<std::int8_t>(raw[0]));
      case PlyScalar::UInt8: return static_cast<double>(raw[0]);
      case PlyScalar::Int16: return load<std::int16_t>(raw);
      case PlyScalar::UInt16: return load<std::uint16_t>(raw);
      case PlyScalar::Int32: return load<std::int32_t>(raw);
      case PlyScalar::UInt32: return load<std::uint32_t>(raw);
      case PlyScalar::Float32: return load<float>(raw);
      case PlyScalar::Float64: return load<double>(raw);
    }
    return 0.0;
  }

  std::size_t offset() const { return pos_; }

 private:
  template <class T>
  static double load(const unsigned char* raw) {
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return static_cast<double>(v);
  }

  const std::string& data_;
  std::size_t pos_;
  std::string name_;
};

inline Mesh parse_ply(const std::string& data, const std::string& name) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= data.size()) throw FormatError(name + ":" + std::to_string(line_no) + ": unexpected end of file");
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    ++line_no;
    return line;
  };
  auto fail = [&](const std::string& what) {
    throw FormatError(name + ":" + std::to_string(line_no) + ": " + what);
  };

  if (next_line() != "ply") fail("missing 'ply' magic");
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail("malformed format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else if (tok[1] == "binary_big_endian") {
        fail("big-endian binary PLY is not supported");
      } else {
        fail("unknown PLY format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      long long count = 0;
      if (tok.size() < 3 || !parse_long(tok[2], count) || count < 0) fail("malformed element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail("property before any element");
      PlyProperty prop;
      if (tok.size() >= 5 && tok[1] == "list") {
        prop.is_list = true;
        if (!ply_scalar_from_name(std::string(tok[2]), prop.count_type) ||
            !ply_scalar_from_name(std::string(tok[3]), prop.type)) {
          fail("unknown list property type");
        }
        prop.name = std::string(tok[4]);
      } else if (tok.size() >= 3) {
        if (!ply_scalar_from_name(std::string(tok[1]), prop.type)) fail("unknown property type '" + std::string(tok[1]) + "'");
        prop.name = std::string(tok[2]);
      } else {
        fail("malformed property line");
      }
      elements.back().properties.push_back(prop);
    } else {
      fail("unexpected header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_format) fail("missing format line");

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  ByteReader reader(data, pos, name);

  for (const PlyElement& el : elements) {
    int xyz[3] = {-1, -1, -1};
    int index_list = -1;
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      const auto& prop = el.properties[p];
      if (el.name == "vertex" && !prop.is_list) {
        if (prop.name == "x") xyz[0] = static_cast<int>(p);
        if (prop.name == "y") xyz[1] = static_cast<int>(p);
        if (prop.name == "z") xyz[2] = static_cast<int>(p);
      }
      if (el.name == "face" && prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
        index_list = static_cast<int>(p);
      }
    }
    if (el.name == "vertex" && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)) fail("vertex element lacks x, y, z");
    if (el.name == "face" && index_list < 0) fail("face element lacks vertex_indices");

    std::vector<double> scalars(el.properties.size());
    std::vector<Index> poly;
    for (std::size_t row = 0; row < el.count; ++row) {
      std::vector<std::string_view> tok;
      std::string line;
      std::size_t cursor = 0;
      if (!binary) {
        do {
          line = next_line();
          tok = split_ws(line);
        } while (tok.empty());
      }
      auto ascii_next = [&]() -> double {
        if (cursor >= tok.size()) fail("too few values in " + el.name + " record");
        double v = 0.0;
        if (!parse_double(tok[cursor], v)) fail("bad number '" + std::string(tok[cursor]) + "'");
        ++cursor;
        return v;
      };
      for (std::size_t p = 0; p < el.properties.size(); ++p) {
        const auto& prop = el.properties[p];
        if (!prop.is_list) {
          scalars[p] = binary ? reader.read(prop.type) : ascii_next();
          continue;
        }
        const double count_value = binary ? reader.read(prop.count_type) : ascii_next();
        if (count_value < 0) fail("negative list length");
        const auto count = static_cast<std::size_t>(count_value);
        const bool keep = static_cast<int>(p) == index_list;
        if (keep) poly.clear();
        for (std::size_t k = 0; k < count; ++k) {
          const double v = binary ? reader.read(prop.type) : ascii_next();
          if (keep) {
            if (v < 0 || v != std::floor(v)) fail("bad vertex index in face " + std::to_string(row));
            poly.push_back(static_cast<Index>(v));
          }
        }
      }
      if (el.name == "vertex") {
        vertices.emplace_back(scalars[xyz[0]], scalars[xyz[1]], scalars[xyz[2]]);
      } else if (el.name == "face") {
        if (poly.size() < 3) fail("face " + std::to_string(row) + " has fewer than three vertices");
        append_fan(faces, poly);
      }
    }
  }
  return Mesh(std::move(vertices), std::move(faces));
}

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.write(reinterpret_cast<const char*>(raw), sizeof(T));
}

}  // namespace detail

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = detail::lower(path.extension().string());
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext == ".ply") return MeshFormat::PlyBinary;
  throw ArgumentError("cannot infer mesh format from extension '" + ext + "'");
}

/// Loads an OBJ or PLY file. With MeshFormat::Auto the format comes from the
/// extension; PLY ascii vs binary is always taken from its header.
inline Mesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == MeshFormat::Auto) {
    if (data.rfind("ply", 0) == 0) {
      format = MeshFormat::PlyAscii;
    } else {
      format = format_from_path(path);
    }
  }
  if (format == MeshFormat::Obj) {
    std::istringstream stream(data);
    return detail::parse_obj(stream, path.string());
  }
  return detail::parse_ply(data, path.string());
}

inline void write_mesh(std::ostream& out, const Mesh& mesh, MeshFormat format, const SaveOptions& options = {}) {
  if (format == MeshFormat::Auto) throw ArgumentError("write_mesh needs an explicit format");
  if (format == MeshFormat::Obj) {
    out << std::setprecision(options.ascii_precision);
    for (const Vec3& p : mesh.vertices()) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    return;
  }
  const bool binary = format == MeshFormat::PlyBinary;
  out << "ply\n"
      << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
      << "element vertex " << mesh.vertex_count() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.face_count() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
  if (binary) {
    for (const Vec3& p : mesh.vertices())
      for (int k = 0; k < 3; ++k) detail::put_le<double>(out, p[k]);
    for (const Face& f : mesh.faces()) {
      detail::put_le<std::uint8_t>(out, 3);
      for (Index v : f) detail::put_le<std::int32_t>(out, static_cast<std::int32_t>(v));
    }
  } else {
    out << std::setprecision(options.ascii_precision);
    for (const Vec3& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const Face& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

inline void save_mesh(const Mesh& mesh, const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto,
                      const SaveOptions& options = {}) {
  if (format == MeshFormat::Auto) format = format_from_path(path);
  if (mesh.vertex_count() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ArgumentError("mesh too large for int32 face indices");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_mesh(out, mesh, format, options);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mdn
