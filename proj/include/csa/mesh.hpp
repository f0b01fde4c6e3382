#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csa/geometry.hpp"

namespace csa {

using VertexId = std::uint32_t;
using FaceId = std::uint32_t;

class MeshError : public std::runtime_error {
 public:
  enum class Kind {
    TruncatedFile,
    MalformedAscii,
    EmptyMesh,
    InvalidFace,
    DegenerateFace,
    NotWatertight,
    Io,
  };

  MeshError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(MeshError::Kind kind);

/// Indexed polygon mesh. Faces are stored as a flat index list plus offsets,
/// so any face size M >= 3 is representable even though the STL path only
/// ever produces triangles. Coordinates are in model units; multiply by
/// unit_scale() to obtain millimeters (see to_millimeters()).
class TriMesh {
 public:
  TriMesh() = default;

  VertexId add_vertex(const Point3& p);
  /// Throws MeshError(InvalidFace) on out-of-range ids, M < 3 or a repeated
  /// consecutive index.
  FaceId add_face(std::span<const VertexId> ids);
  FaceId add_face(std::initializer_list<VertexId> ids) { return add_face(std::span<const VertexId>(ids.begin(), ids.size())); }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t face_count() const noexcept { return offsets_.size() - 1; }
  bool empty() const noexcept { return face_count() == 0; }

  std::span<const VertexId> face(FaceId f) const {
    return {indices_.data() + offsets_[f], indices_.data() + offsets_[f + 1]};
  }
  const Point3& vertex(VertexId v) const { return vertices_[v]; }
  const std::vector<Point3>& vertices() const noexcept { return vertices_; }

  double unit_scale() const noexcept { return unit_scale_; }
  void set_unit_scale(double s) noexcept { unit_scale_ = s; }

  void reserve(std::size_t vertices, std::size_t faces, std::size_t corners_per_face = 3);

  friend bool operator==(const TriMesh&, const TriMesh&) = default;

 private:
  std::vector<Point3> vertices_;
  std::vector<VertexId> indices_;
  std::vector<std::uint32_t> offsets_{0};
  double unit_scale_ = 1.0;
};

using FaceCentroids = std::vector<Point3>;

/// Face groups, each sorted ascending; groups ordered by their smallest face id.
struct SubMeshPartition {
  std::vector<std::vector<FaceId>> components;
};

struct WeldResult {
  TriMesh mesh;
  std::size_t dropped_faces = 0;
};

struct BoundingBox {
  Point3 min;
  Point3 max;
};

// --- per-face geometry -----------------------------------------------------

Point3 face_centroid(const TriMesh& mesh, FaceId f);
FaceCentroids all_centroids(const TriMesh& mesh);

/// Newell normal (unnormalized; its length is twice the planar polygon area).
Vec3 newell_normal(const TriMesh& mesh, FaceId f);

/// Expresses the face vertices in an orthonormal in-plane basis: u along the
/// first edge, v = n x u. Throws MeshError(DegenerateFace) when the face has
/// no well-defined plane.
std::vector<Point2> project_to_plane(const TriMesh& mesh, FaceId f);

double shoelace_area(std::span<const Point2> polygon);

/// Shoelace area of the planar projection; 0 for degenerate faces.
double face_area(const TriMesh& mesh, FaceId f);

// --- whole mesh ------------------------------------------------------------

double mesh_total_area(const TriMesh& mesh);

/// True iff every directed edge appears once and its reverse appears once.
bool is_watertight(const TriMesh& mesh);

/// Enclosed volume by signed tetrahedra. Throws MeshError(NotWatertight).
double mesh_volume(const TriMesh& mesh);

BoundingBox bounding_box(const TriMesh& mesh);

/// Merges vertices closer than epsilon (greedy, grid accelerated). Faces left
/// with fewer than three distinct vertices are dropped and counted.
WeldResult weld_vertices(const TriMesh& mesh, double epsilon);

/// Vertex-connectivity partition of a face subset.
SubMeshPartition connected_components(const TriMesh& mesh, std::span<const FaceId> face_ids);

TriMesh transformed(const TriMesh& mesh, const RigidTransform& t);
TriMesh scaled(const TriMesh& mesh, double s);

/// Multiplies coordinates by unit_scale and resets it to 1.
TriMesh to_millimeters(const TriMesh& mesh);

}  // namespace csa
