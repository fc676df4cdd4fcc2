// Copyright 2026 The cfmaps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfmaps/mesh_io.hpp"

#include "cfmaps/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace cfmaps {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Splits text into lines, tracking 1-based line numbers; strips '#' comments.
class LineReader {
 public:
  explicit LineReader(std::string_view text, bool strip_comments = true)
      : text_(text), strip_(strip_comments) {}

  /// Next non-empty line's whitespace-separated tokens; false at EOF.
  bool next(std::vector<std::string_view>& tokens) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      if (strip_) {
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
      }
      tokenize(line, tokens);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }
  std::size_t offset() const { return pos_; }

  static void tokenize(std::string_view line, std::vector<std::string_view>& tokens) {
    tokens.clear();
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
  }

 private:
  std::string_view text_;
  bool strip_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const char* begin = tok.data();
  if (!tok.empty() && tok.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError("expected a number, got '" + std::string(tok) + "'", line);
  }
  return value;
}

long parse_long(std::string_view tok, std::size_t line) {
  long value = 0;
  const char* begin = tok.data();
  if (!tok.empty() && tok.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return value;
}

TriMesh build(std::vector<double>& coords, std::vector<int>& tris) {
  const Eigen::Index nv = static_cast<Eigen::Index>(coords.size() / 3);
  const Eigen::Index nf = static_cast<Eigen::Index>(tris.size() / 3);
  Positions V = Eigen::Map<Positions>(coords.data(), nv, 3);
  Faces F = Eigen::Map<Faces>(tris.data(), nf, 3);
  return TriMesh(std::move(V), std::move(F));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// --- PLY -------------------------------------------------------------------

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::i8;
  if (name == "uchar" || name == "uint8") return PlyType::u8;
  if (name == "short" || name == "int16") return PlyType::i16;
  if (name == "ushort" || name == "uint16") return PlyType::u16;
  if (name == "int" || name == "int32") return PlyType::i32;
  if (name == "uint" || name == "uint32") return PlyType::u32;
  if (name == "float" || name == "float32") return PlyType::f32;
  if (name == "double" || name == "float64") return PlyType::f64;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

double ply_read_binary(const char* p, PlyType t) {
  switch (t) {
    case PlyType::i8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::u8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::i16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::u16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::i32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::u32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::f32: { float v; std::memcpy(&v, p, 4); return v; }
    case PlyType::f64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

TriMesh parse_ply(std::string_view text) {
  LineReader reader(text, false);
  std::vector<std::string_view> tok;
  if (!reader.next(tok) || tok[0] != "ply") throw FormatError("missing 'ply' magic", 1);
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    if (!reader.next(tok)) throw FormatError("unterminated PLY header", reader.line());
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw FormatError("malformed format line", reader.line());
      if (tok[1] == "ascii") binary = false;
      else if (tok[1] == "binary_little_endian") binary = true;
      else throw FormatError("unsupported PLY format " + std::string(tok[1]), reader.line());
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw FormatError("malformed element line", reader.line());
      elements.push_back({std::string(tok[1]),
                          static_cast<std::size_t>(parse_long(tok[2], reader.line())), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw FormatError("property before element", reader.line());
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        auto ct = ply_type(tok[2]);
        auto vt = ply_type(tok[3]);
        if (!ct || !vt) throw FormatError("unknown PLY list type", reader.line());
        prop = {std::string(tok[4]), *vt, true, *ct};
      } else if (tok.size() == 3) {
        auto t = ply_type(tok[1]);
        if (!t) throw FormatError("unknown PLY type " + std::string(tok[1]), reader.line());
        prop = {std::string(tok[2]), *t, false, PlyType::u8};
      } else {
        throw FormatError("malformed property line", reader.line());
      }
      elements.back().properties.push_back(prop);
    } else {
      throw FormatError("unexpected PLY header keyword " + std::string(tok[0]), reader.line());
    }
  }

  std::vector<double> coords;
  std::vector<int> tris;
  auto handle_face = [&](const std::vector<double>& values, std::size_t line) {
    if (values.size() != 3) {
      throw FormatError("only triangle faces are supported, got " +
                            std::to_string(values.size()) + " vertices",
                        line);
    }
    for (double v : values) tris.push_back(static_cast<int>(v));
  };

  if (!binary) {
    for (const auto& el : elements) {
      for (std::size_t r = 0; r < el.count; ++r) {
        if (!reader.next(tok)) throw FormatError("unexpected end of PLY body", reader.line());
        std::size_t t = 0;
        double xyz[3] = {0, 0, 0};
        std::vector<double> face;
        for (const auto& prop : el.properties) {
          if (t >= tok.size()) throw FormatError("truncated PLY row", reader.line());
          if (prop.is_list) {
            const long cnt = parse_long(tok[t++], reader.line());
            std::vector<double> vals;
            for (long c = 0; c < cnt; ++c) {
              if (t >= tok.size()) throw FormatError("truncated PLY list", reader.line());
              vals.push_back(parse_double(tok[t++], reader.line()));
            }
            if (el.name == "face" && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
              face = vals;
            }
          } else {
            const double v = parse_double(tok[t++], reader.line());
            if (el.name == "vertex") {
              if (prop.name == "x") xyz[0] = v;
              if (prop.name == "y") xyz[1] = v;
              if (prop.name == "z") xyz[2] = v;
            }
          }
        }
        if (el.name == "vertex") coords.insert(coords.end(), xyz, xyz + 3);
        if (el.name == "face") handle_face(face, reader.line());
      }
    }
  } else {
    std::size_t pos = reader.offset();
    const std::size_t header_lines = reader.line();
    auto need = [&](std::size_t n) {
      if (pos + n > text.size()) throw FormatError("truncated binary PLY body", header_lines);
    };
    for (const auto& el : elements) {
      for (std::size_t r = 0; r < el.count; ++r) {
        double xyz[3] = {0, 0, 0};
        std::vector<double> face;
        for (const auto& prop : el.properties) {
          if (prop.is_list) {
            need(ply_size(prop.count_type));
            const auto cnt = static_cast<std::size_t>(ply_read_binary(text.data() + pos, prop.count_type));
            pos += ply_size(prop.count_type);
            std::vector<double> vals(cnt);
            need(cnt * ply_size(prop.type));
            for (std::size_t c = 0; c < cnt; ++c) {
              vals[c] = ply_read_binary(text.data() + pos, prop.type);
              pos += ply_size(prop.type);
            }
            if (el.name == "face" && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
              face = std::move(vals);
            }
          } else {
            need(ply_size(prop.type));
            const double v = ply_read_binary(text.data() + pos, prop.type);
            pos += ply_size(prop.type);
            if (el.name == "vertex") {
              if (prop.name == "x") xyz[0] = v;
              if (prop.name == "y") xyz[1] = v;
              if (prop.name == "z") xyz[2] = v;
            }
          }
        }
        if (el.name == "vertex") coords.insert(coords.end(), xyz, xyz + 3);
        if (el.name == "face") handle_face(face, header_lines);
      }
    }
  }
  return build(coords, tris);
}

}  // namespace

std::optional<MeshFormat> parse_mesh_format(std::string_view name) {
  const std::string n = lower(name);
  if (n == "off") return MeshFormat::off;
  if (n == "obj") return MeshFormat::obj;
  if (n == "ply") return MeshFormat::ply;
  return std::nullopt;
}

std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
  return parse_mesh_format(ext);
}

TriMesh parse_off(std::string_view text) {
  LineReader reader(text);
  std::vector<std::string_view> tok;
  if (!reader.next(tok)) throw FormatError("empty OFF file", 1);
  std::size_t first = 0;
  if (tok[0] == "OFF") {
    first = 1;
  } else if (tok[0].size() > 3 && tok[0].substr(0, 3) == "OFF") {
    throw FormatError("unsupported OFF variant " + std::string(tok[0]), reader.line());
  } else {
    throw FormatError("missing OFF header", reader.line());
  }
  if (tok.size() == first) {
    if (!reader.next(tok)) throw FormatError("missing OFF counts", reader.line());
    first = 0;
  }
  if (tok.size() < first + 2) throw FormatError("malformed OFF counts", reader.line());
  const long nv = parse_long(tok[first], reader.line());
  const long nf = parse_long(tok[first + 1], reader.line());
  if (nv < 0 || nf < 0) throw FormatError("negative element count", reader.line());

  std::vector<double> coords;
  coords.reserve(3 * nv);
  for (long v = 0; v < nv; ++v) {
    if (!reader.next(tok)) throw FormatError("unexpected end of file in vertex list", reader.line());
    if (tok.size() < 3) throw FormatError("vertex needs three coordinates", reader.line());
    for (int c = 0; c < 3; ++c) coords.push_back(parse_double(tok[c], reader.line()));
  }
  std::vector<int> tris;
  tris.reserve(3 * nf);
  for (long f = 0; f < nf; ++f) {
    if (!reader.next(tok)) throw FormatError("unexpected end of file in face list", reader.line());
    const long count = parse_long(tok[0], reader.line());
    if (count != 3) {
      throw FormatError("only triangle faces are supported, got " + std::to_string(count) +
                            " vertices",
                        reader.line());
    }
    if (tok.size() < 4) throw FormatError("face lists fewer indices than declared", reader.line());
    for (int c = 1; c <= 3; ++c) tris.push_back(static_cast<int>(parse_long(tok[c], reader.line())));
  }
  return build(coords, tris);
}

TriMesh parse_obj(std::string_view text) {
  LineReader reader(text);
  std::vector<std::string_view> tok;
  std::vector<double> coords;
  std::vector<int> tris;
  while (reader.next(tok)) {
    if (tok[0] == "v") {
      if (tok.size() < 4) throw FormatError("vertex needs three coordinates", reader.line());
      for (int c = 1; c <= 3; ++c) coords.push_back(parse_double(tok[c], reader.line()));
    } else if (tok[0] == "f") {
      if (tok.size() != 4) {
        throw FormatError("only triangle faces are supported, got " +
                              std::to_string(tok.size() - 1) + " vertices",
                          reader.line());
      }
      for (int c = 1; c <= 3; ++c) {
        std::string_view idx = tok[c].substr(0, tok[c].find('/'));
        long i = parse_long(idx, reader.line());
        const long nv = static_cast<long>(coords.size() / 3);
        if (i < 0) i = nv + i + 1;
        if (i == 0) throw FormatError("OBJ indices are 1-based", reader.line());
        tris.push_back(static_cast<int>(i - 1));
      }
    }
  }
  return build(coords, tris);
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string text = read_file(path);
  switch (format) {
    case MeshFormat::off: return parse_off(text);
    case MeshFormat::obj: return parse_obj(text);
    case MeshFormat::ply: return parse_ply(text);
  }
  throw FormatError("unknown mesh format", 0);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  const auto format = format_from_extension(path);
  if (!format) throw FormatError("cannot infer mesh format from " + path.string(), 0);
  return load_mesh(path, *format);
}

std::string to_off_string(const TriMesh& mesh) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    os << mesh.vertices()(v, 0) << ' ' << mesh.vertices()(v, 1) << ' ' << mesh.vertices()(v, 2)
       << '\n';
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    os << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2)
       << '\n';
  }
  return os.str();
}

void save_off(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_off_string(mesh);
}

void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>* colors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.num_vertices() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.num_faces() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int c = 0; c < 3; ++c) {
      const double x = mesh.vertices()(v, c);
      out.write(reinterpret_cast<const char*>(&x), sizeof x);
    }
    if (colors) out.write(reinterpret_cast<const char*>(colors->row(v).data()), 3);
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const std::uint8_t three = 3;
    out.write(reinterpret_cast<const char*>(&three), 1);
    for (int c = 0; c < 3; ++c) {
      const std::int32_t idx = mesh.faces()(f, c);
      out.write(reinterpret_cast<const char*>(&idx), sizeof idx);
    }
  }
}

void save_vtk(const TriMesh& mesh, const std::filesystem::path& path,
              std::span<const VtkScalarField> fields) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\ncfmaps\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << mesh.vertices()(v, 0) << ' ' << mesh.vertices()(v, 1) << ' ' << mesh.vertices()(v, 2)
        << '\n';
  }
  out << "POLYGONS " << mesh.num_faces() << ' ' << 4 * mesh.num_faces() << '\n';
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "3 " << mesh.faces()(f, 0) << ' ' << mesh.faces()(f, 1) << ' ' << mesh.faces()(f, 2)
        << '\n';
  }
  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const auto& field : fields) {
      if (field.values.size() != mesh.num_vertices()) {
        throw InvalidArgument("VTK field '" + field.name + "' has the wrong length");
      }
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (int v = 0; v < mesh.num_vertices(); ++v) out << field.values[v] << '\n';
    }
  }
}

}  // namespace cfmaps
