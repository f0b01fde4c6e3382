#include "csa/mesh.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace csa {

const char* to_string(MeshError::Kind kind) {
  switch (kind) {
    case MeshError::Kind::TruncatedFile: return "TruncatedFile";
    case MeshError::Kind::MalformedAscii: return "MalformedAscii";
    case MeshError::Kind::EmptyMesh: return "EmptyMesh";
    case MeshError::Kind::InvalidFace: return "InvalidFace";
    case MeshError::Kind::DegenerateFace: return "DegenerateFace";
    case MeshError::Kind::NotWatertight: return "NotWatertight";
    case MeshError::Kind::Io: return "Io";
  }
  return "Unknown";
}

VertexId TriMesh::add_vertex(const Point3& p) {
  vertices_.push_back(p);
  return static_cast<VertexId>(vertices_.size() - 1);
}

FaceId TriMesh::add_face(std::span<const VertexId> ids) {
  if (ids.size() < 3) throw MeshError(MeshError::Kind::InvalidFace, "face needs at least 3 vertices");
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] >= vertices_.size()) throw MeshError(MeshError::Kind::InvalidFace, "vertex index out of range");
    if (ids[k] == ids[(k + 1) % ids.size()])
      throw MeshError(MeshError::Kind::InvalidFace, "repeated consecutive vertex index");
  }
  indices_.insert(indices_.end(), ids.begin(), ids.end());
  offsets_.push_back(static_cast<std::uint32_t>(indices_.size()));
  return static_cast<FaceId>(offsets_.size() - 2);
}

void TriMesh::reserve(std::size_t vertices, std::size_t faces, std::size_t corners_per_face) {
  vertices_.reserve(vertices);
  indices_.reserve(faces * corners_per_face);
  offsets_.reserve(faces + 1);
}

Point3 face_centroid(const TriMesh& mesh, FaceId f) {
  const auto ids = mesh.face(f);
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  for (const VertexId v : ids) {
    const Point3& p = mesh.vertex(v);
    x += p.x;
    y += p.y;
    z += p.z;
  }
  const auto m = static_cast<double>(ids.size());
  return {x / m, y / m, z / m};
}

FaceCentroids all_centroids(const TriMesh& mesh) {
  FaceCentroids out;
  out.reserve(mesh.face_count());
  for (FaceId f = 0; f < mesh.face_count(); ++f) out.push_back(face_centroid(mesh, f));
  return out;
}

Vec3 newell_normal(const TriMesh& mesh, FaceId f) {
  const auto ids = mesh.face(f);
  Vec3 n{};
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const Point3& a = mesh.vertex(ids[k]);
    const Point3& b = mesh.vertex(ids[(k + 1) % ids.size()]);
    n.x += (a.y - b.y) * (a.z + b.z);
    n.y += (a.z - b.z) * (a.x + b.x);
    n.z += (a.x - b.x) * (a.y + b.y);
  }
  return n;
}

std::vector<Point2> project_to_plane(const TriMesh& mesh, FaceId f) {
  const auto ids = mesh.face(f);
  const Point3& origin = mesh.vertex(ids[0]);

  double reach = 0.0;
  for (const VertexId v : ids) reach = std::max(reach, norm(mesh.vertex(v) - origin));

  // The degeneracy tolerance is relative to the squared face extent so that
  // the test is unit independent.
  const Vec3 raw = newell_normal(mesh, f);
  const double raw_norm = norm(raw);
  if (!(raw_norm > 1e-12 * reach * reach))
    throw MeshError(MeshError::Kind::DegenerateFace, "face " + std::to_string(f) + " has no well-defined plane");
  const Vec3 n = raw / raw_norm;

  Vec3 u{};
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const Vec3 e = mesh.vertex(ids[k]) - origin;
    const double len = norm(e);
    if (len > 0.0) {
      u = e / len;
      break;
    }
  }
  // Remove any normal component left by roundoff so (u, v, n) is orthonormal.
  u = u - n * dot(u, n);
  u = u / norm(u);
  const Vec3 v = cross(n, u);

  std::vector<Point2> out;
  out.reserve(ids.size());
  for (const VertexId id : ids) {
    const Vec3 d = mesh.vertex(id) - origin;
    out.push_back({dot(d, u), dot(d, v)});
  }
  return out;
}

double shoelace_area(std::span<const Point2> p) {
  const std::size_t n = p.size();
  if (n < 3) return 0.0;
  double forward = 0.0;
  double backward = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    forward += p[i].x * p[i + 1].y;
    backward += p[i + 1].x * p[i].y;
  }
  forward += p[n - 1].x * p[0].y;
  backward += p[0].x * p[n - 1].y;
  return 0.5 * std::abs(forward - backward);
}

double face_area(const TriMesh& mesh, FaceId f) {
  try {
    const auto polygon = project_to_plane(mesh, f);
    return shoelace_area(polygon);
  } catch (const MeshError& e) {
    if (e.kind() == MeshError::Kind::DegenerateFace) return 0.0;
    throw;
  }
}

double mesh_total_area(const TriMesh& mesh) {
  double total = 0.0;
  for (FaceId f = 0; f < mesh.face_count(); ++f) total += face_area(mesh, f);
  return total;
}

namespace {

std::uint64_t edge_key(VertexId a, VertexId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

}  // namespace

bool is_watertight(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.face_count() * 3);
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const auto ids = mesh.face(f);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (++directed[edge_key(ids[k], ids[(k + 1) % ids.size()])] > 1) return false;
    }
  }
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<VertexId>(key >> 32);
    const auto b = static_cast<VertexId>(key & 0xffffffffu);
    if (!directed.contains(edge_key(b, a))) return false;
  }
  return !directed.empty();
}

double mesh_volume(const TriMesh& mesh) {
  if (!is_watertight(mesh)) throw MeshError(MeshError::Kind::NotWatertight, "mesh is not closed and consistently wound");
  double six_volume = 0.0;
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const auto ids = mesh.face(f);
    const Point3& a = mesh.vertex(ids[0]);
    for (std::size_t k = 1; k + 1 < ids.size(); ++k)
      six_volume += dot(a, cross(mesh.vertex(ids[k]), mesh.vertex(ids[k + 1])));
  }
  return std::abs(six_volume) / 6.0;
}

BoundingBox bounding_box(const TriMesh& mesh) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{{inf, inf, inf}, {-inf, -inf, -inf}};
  for (const Point3& p : mesh.vertices()) {
    box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
    box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
  }
  return box;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& c) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(c.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(c.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct PointHash {
  std::size_t operator()(const Point3& p) const noexcept {
    const auto bits = [](double d) {
      if (d == 0.0) d = 0.0;  // fold -0 onto +0
      std::uint64_t u;
      static_assert(sizeof u == sizeof d);
      std::memcpy(&u, &d, sizeof u);
      return u;
    };
    return CellHash{}(CellKey{static_cast<std::int64_t>(bits(p.x)), static_cast<std::int64_t>(bits(p.y)),
                              static_cast<std::int64_t>(bits(p.z))});
  }
};

}  // namespace

WeldResult weld_vertices(const TriMesh& mesh, double epsilon) {
  std::vector<VertexId> remap(mesh.vertex_count());
  TriMesh out;
  out.set_unit_scale(mesh.unit_scale());

  if (epsilon <= 0.0) {
    std::unordered_map<Point3, VertexId, PointHash> seen;
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      const auto [it, inserted] = seen.try_emplace(mesh.vertex(v), 0);
      if (inserted) it->second = out.add_vertex(mesh.vertex(v));
      remap[v] = it->second;
    }
  } else {
    const double eps2 = epsilon * epsilon;
    std::unordered_map<CellKey, std::vector<VertexId>, CellHash> grid;
    const auto cell_of = [epsilon](const Point3& p) {
      return CellKey{static_cast<std::int64_t>(std::floor(p.x / epsilon)),
                     static_cast<std::int64_t>(std::floor(p.y / epsilon)),
                     static_cast<std::int64_t>(std::floor(p.z / epsilon))};
    };
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      const Point3& p = mesh.vertex(v);
      const CellKey c = cell_of(p);
      VertexId found = std::numeric_limits<VertexId>::max();
      double best = std::numeric_limits<double>::infinity();
      for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
            if (it == grid.end()) continue;
            for (const VertexId rep : it->second) {
              const double d2 = squared_distance(p, out.vertex(rep));
              // ties go to the lower representative id for determinism
              if (d2 <= eps2 && (d2 < best || (d2 == best && rep < found))) {
                best = d2;
                found = rep;
              }
            }
          }
      if (found == std::numeric_limits<VertexId>::max()) {
        found = out.add_vertex(p);
        grid[c].push_back(found);
      }
      remap[v] = found;
    }
  }

  WeldResult result;
  std::vector<VertexId> ids;
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    ids.clear();
    for (const VertexId v : mesh.face(f)) {
      const VertexId r = remap[v];
      if (ids.empty() || ids.back() != r) ids.push_back(r);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    std::vector<VertexId> distinct = ids;
    std::sort(distinct.begin(), distinct.end());
    if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3) {
      ++result.dropped_faces;
      continue;
    }
    out.add_face(ids);
  }
  result.mesh = std::move(out);
  return result;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

SubMeshPartition connected_components(const TriMesh& mesh, std::span<const FaceId> face_ids) {
  SubMeshPartition partition;
  if (face_ids.empty()) return partition;

  std::vector<FaceId> faces(face_ids.begin(), face_ids.end());
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  // Graph nodes are the vertices used by the subset; edges follow each face
  // loop including the closing last-to-first edge.
  DisjointSets sets(mesh.vertex_count());
  for (const FaceId f : faces) {
    const auto ids = mesh.face(f);
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) sets.unite(ids[k], ids[k + 1]);
    sets.unite(ids.back(), ids.front());
  }

  std::unordered_map<std::uint32_t, std::size_t> component_of_root;
  for (const FaceId f : faces) {
    const std::uint32_t root = sets.find(mesh.face(f)[0]);
    const auto [it, inserted] = component_of_root.try_emplace(root, partition.components.size());
    if (inserted) partition.components.emplace_back();
    partition.components[it->second].push_back(f);
  }
  return partition;
}

TriMesh transformed(const TriMesh& mesh, const RigidTransform& t) {
  TriMesh out;
  out.set_unit_scale(mesh.unit_scale());
  out.reserve(mesh.vertex_count(), mesh.face_count());
  for (const Point3& p : mesh.vertices()) out.add_vertex(t.apply(p));
  for (FaceId f = 0; f < mesh.face_count(); ++f) out.add_face(mesh.face(f));
  return out;
}

TriMesh scaled(const TriMesh& mesh, double s) {
  TriMesh out;
  out.set_unit_scale(mesh.unit_scale());
  out.reserve(mesh.vertex_count(), mesh.face_count());
  for (const Point3& p : mesh.vertices()) out.add_vertex(p * s);
  for (FaceId f = 0; f < mesh.face_count(); ++f) out.add_face(mesh.face(f));
  return out;
}

TriMesh to_millimeters(const TriMesh& mesh) {
  TriMesh out = scaled(mesh, mesh.unit_scale());
  out.set_unit_scale(1.0);
  return out;
}

}  // namespace csa
