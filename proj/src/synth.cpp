#include "csa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <unordered_map>

namespace csa::synth {

namespace {

/// Uniform doubles from the raw mt19937_64 stream, so suites are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

/// Builds an indexed mesh from corner coordinates, merging exactly equal
/// points so that separately generated patches share boundary vertices.
class MeshAssembler {
 public:
  VertexId vertex(const Point3& p) {
    const auto [it, inserted] = index_.try_emplace(p, 0);
    if (inserted) it->second = mesh_.add_vertex(p);
    return it->second;
  }

  void triangle(const Point3& a, const Point3& b, const Point3& c) { mesh_.add_face({vertex(a), vertex(b), vertex(c)}); }

  std::size_t face_count() const { return mesh_.face_count(); }
  TriMesh take() { return std::move(mesh_); }

 private:
  struct Hash {
    std::size_t operator()(const Point3& p) const noexcept {
      std::size_t h = 0;
      for (double d : {p.x, p.y, p.z}) {
        if (d == 0.0) d = 0.0;
        std::uint64_t u;
        std::memcpy(&u, &d, sizeof u);
        h ^= std::hash<std::uint64_t>{}(u) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  TriMesh mesh_;
  std::unordered_map<Point3, VertexId, Hash> index_;
};

/// Contact gap between tumour and indentation, as a fraction of the mean
/// submerged edge length.
constexpr double kContactGapFraction = 0.01;

/// Vertices closer to the cut plane than this fraction of the mean edge
/// length are moved onto it, so the cut leaves no sliver faces at the rim.
constexpr double kPlaneSnapFraction = 0.2;

std::uint64_t edge_key(VertexId a, VertexId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

/// Fixed generic tilt so that no symmetry plane of the icosahedron lines up
/// with the cut plane.
const RigidTransform& generic_tilt() {
  static const RigidTransform tilt = RigidTransform::axis_angle({1.0, 2.0, 3.0}, 0.5);
  return tilt;
}

struct CutTumor {
  TriMesh mesh;
  std::vector<bool> submerged;
};

/// Splits every face crossing z = z0 so each face lies entirely on one side.
/// Vertices near the plane are snapped onto it first.
/// Crossing points are cached per edge, so the result stays watertight.
CutTumor cut_at_plane(const TriMesh& closed, double z0) {
  double edge_sum = 0.0;
  std::size_t edge_count = 0;
  for (FaceId f = 0; f < closed.face_count(); ++f) {
    const auto ids = closed.face(f);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      edge_sum += distance(closed.vertex(ids[k]), closed.vertex(ids[(k + 1) % ids.size()]));
      ++edge_count;
    }
  }
  const double snap = kPlaneSnapFraction * edge_sum / static_cast<double>(edge_count);

  const auto side_of = [z0](double z) { return z < z0 ? -1 : (z > z0 ? 1 : 0); };
  std::vector<int> side(closed.vertex_count());
  for (VertexId v = 0; v < closed.vertex_count(); ++v) {
    const double z = closed.vertex(v).z;
    side[v] = std::abs(z - z0) <= snap ? 0 : side_of(z);
  }
  // A face flattened into the plane would overlap the organ's top, so its
  // vertices keep their true height (this happens when the plane grazes
  // the top of the tumour).
  for (FaceId f = 0; f < closed.face_count(); ++f) {
    const auto ids = closed.face(f);
    if (std::all_of(ids.begin(), ids.end(), [&](VertexId v) { return side[v] == 0; }))
      for (const VertexId v : ids) side[v] = side_of(closed.vertex(v).z);
  }

  CutTumor out;
  for (VertexId v = 0; v < closed.vertex_count(); ++v) {
    Point3 p = closed.vertex(v);
    if (side[v] == 0) p.z = z0;
    out.mesh.add_vertex(p);
  }

  std::unordered_map<std::uint64_t, VertexId> crossings;
  const auto crossing = [&](VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    const auto [it, inserted] = crossings.try_emplace(edge_key(a, b), 0);
    if (inserted) {
      const Point3 pa = out.mesh.vertex(a);
      const Point3 pb = out.mesh.vertex(b);
      const double t = (z0 - pa.z) / (pb.z - pa.z);
      Point3 p = pa + (pb - pa) * t;
      p.z = z0;
      it->second = out.mesh.add_vertex(p);
      side.push_back(0);
    }
    return it->second;
  };

  const auto add_polygon = [&](const std::vector<VertexId>& poly, bool below) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      out.mesh.add_face({poly[0], poly[k], poly[k + 1]});
      out.submerged.push_back(below);
    }
  };

  std::vector<VertexId> below;
  std::vector<VertexId> above;
  for (FaceId f = 0; f < closed.face_count(); ++f) {
    const auto ids = closed.face(f);
    bool any_below = false;
    bool any_above = false;
    for (const VertexId v : ids) {
      any_below |= side[v] < 0;
      any_above |= side[v] > 0;
    }
    if (!any_above || !any_below) {
      out.mesh.add_face(ids);
      out.submerged.push_back(!any_above);
      continue;
    }
    below.clear();
    above.clear();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const VertexId cur = ids[k];
      const VertexId nxt = ids[(k + 1) % ids.size()];
      if (side[cur] <= 0) below.push_back(cur);
      if (side[cur] >= 0) above.push_back(cur);
      if (side[cur] * side[nxt] < 0) {
        const VertexId m = crossing(cur, nxt);
        below.push_back(m);
        above.push_back(m);
      }
    }
    add_polygon(below, true);
    add_polygon(above, false);
  }
  return out;
}

/// Ordered boundary loop of the submerged faces (all vertices on the plane).
std::vector<Point3> rim_loop(const CutTumor& tumor) {
  std::unordered_map<std::uint64_t, bool> edges;
  for (FaceId f = 0; f < tumor.mesh.face_count(); ++f) {
    if (!tumor.submerged[f]) continue;
    const auto ids = tumor.mesh.face(f);
    for (std::size_t k = 0; k < ids.size(); ++k) edges.emplace(edge_key(ids[k], ids[(k + 1) % ids.size()]), true);
  }
  std::unordered_map<VertexId, VertexId> next;
  for (const auto& [key, unused] : edges) {
    const auto a = static_cast<VertexId>(key >> 32);
    const auto b = static_cast<VertexId>(key & 0xffffffffu);
    if (!edges.contains(edge_key(b, a))) {
      if (!next.emplace(a, b).second) throw InvalidGeometry("contact rim is not a simple loop");
    }
  }
  std::vector<Point3> loop;
  if (next.empty()) return loop;

  VertexId start = next.begin()->first;
  for (const auto& [a, b] : next) start = std::min(start, a);
  VertexId v = start;
  do {
    loop.push_back(tumor.mesh.vertex(v));
    const auto it = next.find(v);
    if (it == next.end()) throw InvalidGeometry("contact rim is open");
    v = it->second;
  } while (v != start && loop.size() <= next.size());
  if (loop.size() != next.size()) throw InvalidGeometry("contact rim splits into several loops");
  return loop;
}

double signed_area_xy(const std::vector<Point3>& loop) {
  double twice = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Point3& a = loop[k];
    const Point3& b = loop[(k + 1) % loop.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double cross_xy(const Point3& a, const Point3& b, const Point3& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Grid coordinate that hits both end points exactly.
double grid_coord(double lo, double hi, int i, int n) {
  if (i == 0) return lo;
  if (i == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
}

/// Unwrapped polar angles around `center` for a counter-clockwise loop,
/// starting at its smallest angle. Returns the rotation of the loop too.
std::vector<double> unwrapped_angles(const std::vector<Point3>& loop, const Point3& center, std::size_t& first) {
  first = 0;
  double lowest = std::numeric_limits<double>::infinity();
  std::vector<double> raw(loop.size());
  for (std::size_t k = 0; k < loop.size(); ++k) {
    raw[k] = std::atan2(loop[k].y - center.y, loop[k].x - center.x);
    if (raw[k] < lowest) {
      lowest = raw[k];
      first = k;
    }
  }
  std::vector<double> out(loop.size() + 1);
  double prev = raw[first];
  out[0] = prev;
  for (std::size_t k = 1; k < loop.size(); ++k) {
    double a = raw[(first + k) % loop.size()];
    while (a < prev) a += 2.0 * std::numbers::pi;
    out[k] = a;
    prev = a;
  }
  out[loop.size()] = out[0] + 2.0 * std::numbers::pi;
  return out;
}

struct OrganLayout {
  double half_x;
  double half_y;
  double top;
  double bottom;
  int lateral_cells;
  int vertical_cells;
};

/// Triangulates the plate between the square outline and the (convex) hole
/// by merging both loops in angular order around the hole centroid.
void add_top_with_hole(MeshAssembler& organ, const OrganLayout& box, std::vector<Point3> hole) {
  if (signed_area_xy(hole) < 0.0) std::reverse(hole.begin(), hole.end());

  const int g = box.lateral_cells;
  std::vector<Point3> outer;
  for (int i = 0; i < g; ++i) outer.push_back({grid_coord(-box.half_x, box.half_x, i, g), -box.half_y, box.top});
  for (int j = 0; j < g; ++j) outer.push_back({box.half_x, grid_coord(-box.half_y, box.half_y, j, g), box.top});
  for (int i = g; i > 0; --i) outer.push_back({grid_coord(-box.half_x, box.half_x, i, g), box.half_y, box.top});
  for (int j = g; j > 0; --j) outer.push_back({-box.half_x, grid_coord(-box.half_y, box.half_y, j, g), box.top});

  Point3 center{};
  for (const Point3& p : hole) center += p;
  center = center / static_cast<double>(hole.size());

  std::size_t hole_first = 0;
  std::size_t outer_first = 0;
  const auto hole_angles = unwrapped_angles(hole, center, hole_first);
  auto outer_angles = unwrapped_angles(outer, center, outer_first);
  // Start both sequences in the same turn.
  if (outer_angles[0] > hole_angles[0] + std::numbers::pi)
    for (double& a : outer_angles) a -= 2.0 * std::numbers::pi;

  const auto hole_at = [&](std::size_t k) { return hole[(hole_first + k) % hole.size()]; };
  const auto outer_at = [&](std::size_t k) { return outer[(outer_first + k) % outer.size()]; };

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < hole.size() || j < outer.size()) {
    Point3 a, b, c;
    if (i < hole.size() && (j == outer.size() || hole_angles[i + 1] <= outer_angles[j + 1])) {
      a = hole_at(i);
      b = outer_at(j);
      c = hole_at(i + 1);
      ++i;
    } else {
      a = hole_at(i);
      b = outer_at(j);
      c = outer_at(j + 1);
      ++j;
    }
    if (!(cross_xy(a, b, c) > 0.0)) throw InvalidGeometry("organ block too small around the contact rim");
    organ.triangle(a, b, c);
  }
}

void add_box_shell(MeshAssembler& organ, const OrganLayout& box, bool with_top) {
  const int g = box.lateral_cells;
  const int gz = box.vertical_cells;
  const auto X = [&](int i) { return grid_coord(-box.half_x, box.half_x, i, g); };
  const auto Y = [&](int j) { return grid_coord(-box.half_y, box.half_y, j, g); };
  const auto Z = [&](int k) { return grid_coord(box.bottom, box.top, k, gz); };

  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Point3 p00{X(i), Y(j), box.bottom}, p10{X(i + 1), Y(j), box.bottom};
      const Point3 p11{X(i + 1), Y(j + 1), box.bottom}, p01{X(i), Y(j + 1), box.bottom};
      organ.triangle(p00, p11, p10);
      organ.triangle(p00, p01, p11);
      if (with_top) {
        const Point3 t00{X(i), Y(j), box.top}, t10{X(i + 1), Y(j), box.top};
        const Point3 t11{X(i + 1), Y(j + 1), box.top}, t01{X(i), Y(j + 1), box.top};
        organ.triangle(t00, t10, t11);
        organ.triangle(t00, t11, t01);
      }
    }
  }
  for (int k = 0; k < gz; ++k) {
    for (int i = 0; i < g; ++i) {
      // y = -half_y faces -y, y = +half_y faces +y
      const Point3 a{X(i), -box.half_y, Z(k)}, b{X(i + 1), -box.half_y, Z(k)};
      const Point3 c{X(i + 1), -box.half_y, Z(k + 1)}, d{X(i), -box.half_y, Z(k + 1)};
      organ.triangle(a, b, c);
      organ.triangle(a, c, d);
      const Point3 e{X(i), box.half_y, Z(k)}, f{X(i + 1), box.half_y, Z(k)};
      const Point3 h{X(i + 1), box.half_y, Z(k + 1)}, l{X(i), box.half_y, Z(k + 1)};
      organ.triangle(e, h, f);
      organ.triangle(e, l, h);
    }
    for (int j = 0; j < g; ++j) {
      const Point3 a{box.half_x, Y(j), Z(k)}, b{box.half_x, Y(j + 1), Z(k)};
      const Point3 c{box.half_x, Y(j + 1), Z(k + 1)}, d{box.half_x, Y(j), Z(k + 1)};
      organ.triangle(a, b, c);
      organ.triangle(a, c, d);
      const Point3 e{-box.half_x, Y(j), Z(k)}, f{-box.half_x, Y(j + 1), Z(k)};
      const Point3 h{-box.half_x, Y(j + 1), Z(k + 1)}, l{-box.half_x, Y(j), Z(k + 1)};
      organ.triangle(e, h, f);
      organ.triangle(e, l, h);
    }
  }
}

/// Organ block with an indentation that hugs the submerged part of the
/// tumour: the reversed tumour facets, with every vertex off the rim pushed
/// outwards by a small jittered gap so organ and tumour centroids never
/// coincide.
SyntheticPair assemble_pair(const TriMesh& closed_tumor, double z0, const BoxDims& dims, std::uint64_t seed) {
  CutTumor tumor = cut_at_plane(closed_tumor, z0);

  double reach_x = 0.0;
  double reach_y = 0.0;
  bool any_submerged = false;
  for (FaceId f = 0; f < tumor.mesh.face_count(); ++f) {
    if (!tumor.submerged[f]) continue;
    any_submerged = true;
    for (const VertexId v : tumor.mesh.face(f)) {
      reach_x = std::max(reach_x, std::abs(tumor.mesh.vertex(v).x));
      reach_y = std::max(reach_y, std::abs(tumor.mesh.vertex(v).y));
    }
  }
  if (!any_submerged) throw InvalidGeometry("tumour does not reach below the cut plane");
  const BoundingBox tumor_box = bounding_box(tumor.mesh);

  OrganLayout box{};
  box.half_x = dims.size_x / 2.0;
  box.half_y = dims.size_y / 2.0;
  box.top = z0;
  box.bottom = z0 - dims.depth;
  if (!(box.half_x > reach_x && box.half_y > reach_y && box.bottom < tumor_box.min.z))
    throw InvalidGeometry("organ block does not contain the submerged part of the tumour");

  // Enough wall cells that the organ always has more faces than the tumour.
  const int g = std::max(8, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(tumor.mesh.face_count()) / 6.0))) + 1);
  box.lateral_cells = g;
  box.vertical_cells = std::max(2, g / 2);

  // Area-weighted outward normals of the submerged vertices.
  std::vector<Vec3> normals(tumor.mesh.vertex_count(), Vec3{});
  double edge_sum = 0.0;
  std::size_t edge_count = 0;
  for (FaceId f = 0; f < tumor.mesh.face_count(); ++f) {
    if (!tumor.submerged[f]) continue;
    const auto ids = tumor.mesh.face(f);
    const Vec3 n = newell_normal(tumor.mesh, f);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      normals[ids[k]] = normals[ids[k]] + n;
      edge_sum += distance(tumor.mesh.vertex(ids[k]), tumor.mesh.vertex(ids[(k + 1) % ids.size()]));
      ++edge_count;
    }
  }
  const double gap = kContactGapFraction * edge_sum / static_cast<double>(edge_count);

  MeshAssembler organ;
  Rng rng(seed);
  std::vector<Point3> moved(tumor.mesh.vertex_count());
  for (VertexId v = 0; v < tumor.mesh.vertex_count(); ++v) {
    const Point3 p = tumor.mesh.vertex(v);
    const double len = norm(normals[v]);
    // Rim vertices stay on the plane so the organ top closes the cavity.
    moved[v] = (p.z == z0 || len == 0.0) ? p : p + normals[v] * (gap * rng.uniform(0.5, 1.5) / len);
    // Near a grazing top the normal points up; never lift through the lid.
    if (moved[v].z > z0) moved[v].z = p.z;
  }
  for (FaceId f = 0; f < tumor.mesh.face_count(); ++f) {
    if (!tumor.submerged[f]) continue;
    const auto ids = tumor.mesh.face(f);
    organ.triangle(moved[ids[0]], moved[ids[2]], moved[ids[1]]);
  }

  const std::vector<Point3> hole = rim_loop(tumor);
  if (hole.empty()) {
    add_box_shell(organ, box, /*with_top=*/true);
  } else {
    add_box_shell(organ, box, /*with_top=*/false);
    add_top_with_hole(organ, box, hole);
  }

  SyntheticPair pair;
  pair.organ = organ.take();
  pair.tumor = std::move(tumor.mesh);
  return pair;
}

BoxDims default_box(double lateral_radius, double depth_below_plane) {
  const double side = 2.0 * (1.5 * lateral_radius + 2.0);
  return {side, side, depth_below_plane + std::max(3.0, 0.3 * lateral_radius)};
}

}  // namespace

TriMesh icosphere(double radius, int subdiv) {
  if (!(radius > 0.0) || subdiv < 0 || subdiv > 8) throw InvalidGeometry("icosphere needs radius > 0 and 0 <= subdiv <= 8");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Point3& p : v) p = p / norm(p);
  std::vector<std::array<VertexId, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int level = 0; level < subdiv; ++level) {
    std::unordered_map<std::uint64_t, VertexId> midpoints;
    const auto midpoint = [&](VertexId a, VertexId b) {
      const auto key = edge_key(std::min(a, b), std::max(a, b));
      const auto [it, inserted] = midpoints.try_emplace(key, 0);
      if (inserted) {
        const Point3 m = (v[a] + v[b]) / 2.0;
        v.push_back(m / norm(m));
        it->second = static_cast<VertexId>(v.size() - 1);
      }
      return it->second;
    };
    std::vector<std::array<VertexId, 3>> finer;
    finer.reserve(faces.size() * 4);
    for (const auto& [a, b, c] : faces) {
      const VertexId ab = midpoint(a, b);
      const VertexId bc = midpoint(b, c);
      const VertexId ca = midpoint(c, a);
      finer.push_back({a, ab, ca});
      finer.push_back({b, bc, ab});
      finer.push_back({c, ca, bc});
      finer.push_back({ab, bc, ca});
    }
    faces = std::move(finer);
  }

  TriMesh mesh;
  mesh.reserve(v.size(), faces.size());
  for (const Point3& p : v) mesh.add_vertex(p * radius);
  for (const auto& f : faces) mesh.add_face({f[0], f[1], f[2]});
  return mesh;
}

SyntheticPair generate_sphere_pair(double r, double h, int subdiv, std::optional<BoxDims> box, std::uint64_t seed) {
  if (!(r > 0.0) || !(h > 0.0) || h > 2.0 * r) throw InvalidGeometry("sphere pair needs r > 0 and 0 < h <= 2r");
  const TriMesh tumor = transformed(icosphere(r, subdiv), generic_tilt());
  const double z0 = h - r;
  SyntheticPair pair = assemble_pair(tumor, z0, box.value_or(default_box(r, h)), seed);
  pair.ground_truth_csa = 2.0 * std::numbers::pi * r * h;
  pair.descriptor = {"sphere", {{"r", r}, {"h", h}}, subdiv};
  return pair;
}

SyntheticPair generate_ellipsoid_pair(double a, double b, double c, double z0, int subdiv, std::optional<BoxDims> box,
                                      double yaw, std::uint64_t seed) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidGeometry("ellipsoid semi-axes must be positive");
  if (!(z0 > -c && z0 < c)) throw InvalidGeometry("cut plane must satisfy -c < z0 < c");
  const TriMesh unit = transformed(icosphere(1.0, subdiv), generic_tilt());
  const RigidTransform spin = RigidTransform::axis_angle({0.0, 0.0, 1.0}, yaw);
  TriMesh tumor;
  tumor.reserve(unit.vertex_count(), unit.face_count());
  for (const Point3& p : unit.vertices()) tumor.add_vertex(spin.apply({p.x * a, p.y * b, p.z * c}));
  for (FaceId f = 0; f < unit.face_count(); ++f) tumor.add_face(unit.face(f));

  SyntheticPair pair = assemble_pair(tumor, z0, box.value_or(default_box(std::max(a, b), z0 + c)), seed);
  pair.ground_truth_csa = ellipsoid_area_below(a, b, c, z0).value;
  pair.descriptor = {"ellipsoid", {{"a", a}, {"b", b}, {"c", c}, {"z0", z0}, {"yaw", yaw}}, subdiv};
  return pair;
}

QuadratureReport ellipsoid_area_below(double a, double b, double c, double z0) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidGeometry("ellipsoid semi-axes must be positive");
  const double clamped = std::clamp(z0 / c, -1.0, 1.0);
  const double theta0 = std::acos(clamped);
  const double span = std::numbers::pi - theta0;

  // Surface element |p_theta x p_phi| for p = (a s cos phi, b s sin phi, c cos theta).
  // The integrand is even in cos(phi) and sin(phi), so a quarter turn suffices.
  const auto integrate = [&](std::size_t n_theta, std::size_t n_phi) {
    if (span <= 0.0) return 0.0;
    std::vector<double> cos2(n_phi), sin2(n_phi);
    const double dphi = (std::numbers::pi / 2.0) / static_cast<double>(n_phi);
    for (std::size_t k = 0; k < n_phi; ++k) {
      const double phi = (static_cast<double>(k) + 0.5) * dphi;
      cos2[k] = std::cos(phi) * std::cos(phi);
      sin2[k] = std::sin(phi) * std::sin(phi);
    }
    const double dtheta = span / static_cast<double>(n_theta);
    double total = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i) {
      const double theta = theta0 + (static_cast<double>(i) + 0.5) * dtheta;
      const double s = std::sin(theta);
      const double co = std::cos(theta);
      double ring = 0.0;
      for (std::size_t k = 0; k < n_phi; ++k)
        ring += std::sqrt(b * b * c * c * s * s * cos2[k] + a * a * c * c * s * s * sin2[k] + a * a * b * b * co * co);
      total += s * ring;
    }
    return 4.0 * total * dtheta * dphi;
  };

  QuadratureReport report;
  std::size_t n = 1000;
  report.coarse_value = integrate(n / 2, n / 2);
  report.value = integrate(n, n);
  while (true) {
    report.samples = n * n;
    report.relative_change =
        report.value == 0.0 ? 0.0 : std::abs(report.value - report.coarse_value) / std::abs(report.value);
    if (report.relative_change < 1e-7 || n >= 8000) break;
    n *= 2;
    report.coarse_value = report.value;
    report.value = integrate(n, n);
  }
  return report;
}

std::vector<SyntheticPair> generate_suite(std::uint64_t seed, int base_subdiv) {
  Rng rng(seed);
  std::vector<SyntheticPair> suite;
  suite.reserve(20);
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t pair_seed = seed * 1000003ull + static_cast<std::uint64_t>(k) + 1;
    SyntheticPair pair;
    if (k < 12) {
      const double r = rng.uniform(6.0, 15.0);
      const double h = r * rng.uniform(0.35, 1.5);
      const int subdiv = base_subdiv + (k % 3 == 2 ? 1 : 0);
      pair = generate_sphere_pair(r, h, subdiv, std::nullopt, pair_seed);
    } else {
      const double a = rng.uniform(6.0, 15.0);
      const double b = rng.uniform(6.0, 15.0);
      const double c = rng.uniform(6.0, 15.0);
      const double z0 = c * rng.uniform(-0.6, 0.5);
      const double yaw = rng.uniform(0.0, std::numbers::pi);
      pair = generate_ellipsoid_pair(a, b, c, z0, base_subdiv, std::nullopt, yaw, pair_seed);
    }
    char id[16];
    std::snprintf(id, sizeof id, "pair_%02d", k + 1);
    pair.id = id;
    suite.push_back(std::move(pair));
  }
  return suite;
}

}  // namespace csa::synth
