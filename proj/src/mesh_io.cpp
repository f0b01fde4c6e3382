#include "csa/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace csa {

namespace {

static_assert(std::endian::native == std::endian::little, "STL I/O assumes a little-endian host");

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kRecordSize = 50;

struct PointKeyHash {
  std::size_t operator()(const Point3& p) const noexcept {
    const auto mix = [](std::size_t h, double d) {
      if (d == 0.0) d = 0.0;
      std::uint64_t u;
      std::memcpy(&u, &d, sizeof u);
      return h ^ (std::hash<std::uint64_t>{}(u) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
    };
    return mix(mix(mix(0, p.x), p.y), p.z);
  }
};

/// Triangle soup to indexed mesh with exact deduplication.
class SoupBuilder {
 public:
  void add_triangle(const Point3& a, const Point3& b, const Point3& c) {
    const VertexId ia = intern(a);
    const VertexId ib = intern(b);
    const VertexId ic = intern(c);
    if (ia == ib || ib == ic || ia == ic) return;
    mesh_.add_face({ia, ib, ic});
  }

  TriMesh take() { return std::move(mesh_); }

 private:
  VertexId intern(const Point3& p) {
    const auto [it, inserted] = index_.try_emplace(p, 0);
    if (inserted) it->second = mesh_.add_vertex(p);
    return it->second;
  }

  TriMesh mesh_;
  std::unordered_map<Point3, VertexId, PointKeyHash> index_;
};

class AsciiTokens {
 public:
  explicit AsciiTokens(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) return std::nullopt;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void malformed(const std::string& what) { throw MeshError(MeshError::Kind::MalformedAscii, what); }

void expect(AsciiTokens& tokens, std::string_view word) {
  const auto t = tokens.next();
  if (!t || *t != word) malformed("expected '" + std::string(word) + "'");
}

double parse_number(AsciiTokens& tokens) {
  const auto t = tokens.next();
  if (!t) malformed("unexpected end of file");
  std::string_view s = *t;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    malformed("bad number '" + std::string(*t) + "'");
  return value;
}

TriMesh parse_ascii(std::string_view text) {
  AsciiTokens tokens(text);
  expect(tokens, "solid");
  tokens.skip_line();  // solid name may contain spaces

  SoupBuilder builder;
  std::size_t facets = 0;
  for (;;) {
    const auto t = tokens.next();
    if (!t) malformed("missing endsolid");
    if (*t == "endsolid") break;
    if (*t != "facet") malformed("expected 'facet' or 'endsolid'");
    expect(tokens, "normal");
    for (int k = 0; k < 3; ++k) parse_number(tokens);
    expect(tokens, "outer");
    expect(tokens, "loop");
    std::array<Point3, 3> corners;
    for (auto& c : corners) {
      expect(tokens, "vertex");
      c.x = parse_number(tokens);
      c.y = parse_number(tokens);
      c.z = parse_number(tokens);
    }
    expect(tokens, "endloop");
    expect(tokens, "endfacet");
    builder.add_triangle(corners[0], corners[1], corners[2]);
    ++facets;
  }
  if (facets == 0) throw MeshError(MeshError::Kind::EmptyMesh, "STL contains no triangles");
  return builder.take();
}

float read_f32(const char* p) {
  float f;
  std::memcpy(&f, p, sizeof f);
  return f;
}

TriMesh parse_binary(std::string_view bytes, bool exact_length) {
  if (bytes.size() < kHeaderSize + 4)
    throw MeshError(MeshError::Kind::TruncatedFile, "binary STL shorter than its 84-byte preamble");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + kHeaderSize, sizeof count);
  const std::uint64_t expected = kHeaderSize + 4 + static_cast<std::uint64_t>(count) * kRecordSize;
  if (bytes.size() < expected || (exact_length && bytes.size() != expected))
    throw MeshError(MeshError::Kind::TruncatedFile, "binary STL declares " + std::to_string(count) +
                                                        " triangles but holds " + std::to_string(bytes.size()) +
                                                        " bytes (expected " + std::to_string(expected) + ")");
  if (count == 0) throw MeshError(MeshError::Kind::EmptyMesh, "STL contains no triangles");

  SoupBuilder builder;
  const char* p = bytes.data() + kHeaderSize + 4;
  for (std::uint32_t t = 0; t < count; ++t, p += kRecordSize) {
    std::array<Point3, 3> corners;
    for (int k = 0; k < 3; ++k) {
      const char* v = p + 12 + 12 * k;
      corners[k] = {read_f32(v), read_f32(v + 4), read_f32(v + 8)};
      if (!is_finite(corners[k]))
        throw MeshError(MeshError::Kind::InvalidFace, "non-finite coordinate in triangle " + std::to_string(t));
    }
    builder.add_triangle(corners[0], corners[1], corners[2]);
  }
  return builder.take();
}

template <class Fn>
void for_each_triangle(const TriMesh& mesh, Fn&& fn) {
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const auto ids = mesh.face(f);
    for (std::size_t k = 1; k + 1 < ids.size(); ++k)
      fn(mesh.vertex(ids[0]), mesh.vertex(ids[k]), mesh.vertex(ids[k + 1]));
  }
}

Vec3 unit_normal(const Point3& a, const Point3& b, const Point3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double len = norm(n);
  return len > 0.0 ? n / len : Vec3{};
}

void append_f32(std::string& out, double d) {
  const auto f = static_cast<float>(d);
  char buf[4];
  std::memcpy(buf, &f, sizeof f);
  out.append(buf, 4);
}

}  // namespace

TriMesh parse_stl(std::string_view bytes) {
  if (bytes.starts_with("solid")) {
    try {
      return parse_ascii(bytes);
    } catch (const MeshError& ascii_error) {
      if (ascii_error.kind() == MeshError::Kind::EmptyMesh) throw;
      // Some binary exporters start their header with "solid"; accept the
      // binary reading only when the length matches exactly.
      try {
        return parse_binary(bytes, /*exact_length=*/true);
      } catch (const MeshError&) {
        throw ascii_error;
      }
    }
  }
  return parse_binary(bytes, /*exact_length=*/false);
}

TriMesh read_stl_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_stl(bytes);
  } catch (const MeshError& e) {
    throw MeshError(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_stl_binary(const TriMesh& mesh, std::string_view header) {
  std::size_t triangles = 0;
  for (FaceId f = 0; f < mesh.face_count(); ++f) triangles += mesh.face(f).size() - 2;

  std::string out(kHeaderSize, '\0');
  std::copy_n(header.data(), std::min(header.size(), kHeaderSize), out.begin());
  // A binary header must not look like ASCII.
  if (out.starts_with("solid")) out[0] = 'S';
  const auto count = static_cast<std::uint32_t>(triangles);
  char buf[4];
  std::memcpy(buf, &count, sizeof count);
  out.append(buf, 4);
  out.reserve(out.size() + triangles * kRecordSize);
  for_each_triangle(mesh, [&](const Point3& a, const Point3& b, const Point3& c) {
    const Vec3 n = unit_normal(a, b, c);
    for (const Point3& p : {n, a, b, c}) {
      append_f32(out, p.x);
      append_f32(out, p.y);
      append_f32(out, p.z);
    }
    out.append(2, '\0');
  });
  return out;
}

std::string serialize_stl_ascii(const TriMesh& mesh, std::string_view name) {
  std::ostringstream os;
  os.precision(17);
  os << "solid " << name << '\n';
  for_each_triangle(mesh, [&](const Point3& a, const Point3& b, const Point3& c) {
    const Vec3 n = unit_normal(a, b, c);
    os << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << "\n    outer loop\n";
    for (const Point3& p : {a, b, c}) os << "      vertex " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    os << "    endloop\n  endfacet\n";
  });
  os << "endsolid " << name << '\n';
  return os.str();
}

std::string serialize_ply_colored(const TriMesh& mesh, std::span<const FaceId> highlighted) {
  std::vector<bool> hot(mesh.face_count(), false);
  for (const FaceId f : highlighted) {
    if (f >= mesh.face_count()) throw std::out_of_range("highlighted face id " + std::to_string(f) + " out of range");
    hot[f] = true;
  }

  std::ostringstream os;
  os << "ply\nformat ascii 1.0\ncomment contact surface highlight\n"
     << "element vertex " << mesh.vertex_count() << "\nproperty float x\nproperty float y\nproperty float z\n"
     << "element face " << mesh.face_count() << "\nproperty list uchar int vertex_indices\n"
     << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  os.precision(9);
  for (const Point3& p : mesh.vertices()) os << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const auto ids = mesh.face(f);
    os << ids.size();
    for (const VertexId v : ids) os << ' ' << v;
    const Rgb& c = hot[f] ? kHighlightColor : kBaseColor;
    os << ' ' << int{c[0]} << ' ' << int{c[1]} << ' ' << int{c[2]} << '\n';
  }
  return os.str();
}

void export_ply_colored(const TriMesh& mesh, std::span<const FaceId> highlighted, const std::filesystem::path& path) {
  write_file(path, serialize_ply_colored(mesh, highlighted));
}

ColoredMesh parse_ply_colored(std::string_view text) {
  std::istringstream is{std::string(text)};
  const auto fail = [](const std::string& what) -> void {
    throw MeshError(MeshError::Kind::MalformedAscii, "PLY: " + what);
  };
  std::string line;
  std::size_t vertices = 0;
  std::size_t faces = 0;
  if (!std::getline(is, line) || line != "ply") fail("missing magic");
  while (std::getline(is, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string word, kind;
    ls >> word;
    if (word == "format") {
      ls >> kind;
      if (kind != "ascii") fail("only ascii PLY is supported");
    } else if (word == "element") {
      std::size_t n = 0;
      ls >> kind >> n;
      if (kind == "vertex") vertices = n;
      else if (kind == "face") faces = n;
    }
  }
  if (line != "end_header") fail("missing end_header");

  ColoredMesh out;
  for (std::size_t i = 0; i < vertices; ++i) {
    Point3 p;
    if (!(is >> p.x >> p.y >> p.z)) fail("truncated vertex list");
    out.mesh.add_vertex(p);
  }
  std::vector<VertexId> ids;
  for (std::size_t i = 0; i < faces; ++i) {
    std::size_t n = 0;
    if (!(is >> n)) fail("truncated face list");
    ids.resize(n);
    for (auto& v : ids)
      if (!(is >> v)) fail("truncated face list");
    int r = 0, g = 0, b = 0;
    if (!(is >> r >> g >> b)) fail("missing face colour");
    out.mesh.add_face(ids);
    out.face_colors.push_back({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)});
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(MeshError::Kind::Io, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw MeshError(MeshError::Kind::Io, "read failure on " + path.string());
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MeshError(MeshError::Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw MeshError(MeshError::Kind::Io, "write failure on " + path.string());
}

}  // namespace csa
