#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csa/mesh.hpp"
#include "csa/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace csa;
using doctest::Approx;

namespace {

double dist2(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_CASE("face validation") {
  TriMesh m;
  const auto a = m.add_vertex({0, 0, 0});
  const auto b = m.add_vertex({1, 0, 0});
  m.add_vertex({0, 1, 0});
  CHECK_THROWS_AS(m.add_face({a, b}), MeshError);
  CHECK_THROWS_AS(m.add_face({a, b, 7}), MeshError);
  CHECK_THROWS_AS(m.add_face({a, a, b}), MeshError);
  CHECK_THROWS_AS(m.add_face({a, b, a}), MeshError);  // closing edge repeats too
  CHECK(m.face_count() == 0);
  m.add_face({0, 1, 2});
  CHECK(m.face_count() == 1);
}

TEST_CASE("face centroid") {
  const TriMesh t = fixture::single_triangle({0, 0, 0}, {3, 0, 0}, {0, 3, 0});
  CHECK(face_centroid(t, 0) == Point3{1, 1, 0});

  const TriMesh degenerate = [] {
    TriMesh m;
    m.add_vertex({1, 1, 1});
    m.add_vertex({1, 1, 1});
    m.add_vertex({1, 1, 1});
    m.add_face({0, 1, 2});
    return m;
  }();
  CHECK(face_centroid(degenerate, 0) == Point3{1, 1, 1});

  TriMesh quad;
  quad.add_vertex({0, 0, 0});
  quad.add_vertex({2, 0, 0});
  quad.add_vertex({2, 2, 0});
  quad.add_vertex({0, 2, 0});
  quad.add_face({0, 1, 2, 3});
  CHECK(face_centroid(quad, 0) == Point3{1, 1, 0});
}

TEST_CASE("all_centroids matches face order") {
  CHECK(all_centroids(fixture::single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0})).size() == 1);
  const TriMesh cube = fixture::unit_cube();
  const FaceCentroids c = all_centroids(cube);
  REQUIRE(c.size() == 12);
  for (FaceId f = 0; f < cube.face_count(); ++f) {
    const auto ids = cube.face(f);
    const Point3 mean = (cube.vertex(ids[0]) + cube.vertex(ids[1]) + cube.vertex(ids[2])) / 3.0;
    CHECK(distance(c[f], mean) < 1e-15);
  }
}

TEST_CASE("project_to_plane") {
  const TriMesh t = fixture::single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const auto p = project_to_plane(t, 0);
  REQUIRE(p.size() == 3);
  CHECK(p[0].x == Approx(0.0));
  CHECK(p[0].y == Approx(0.0));
  CHECK(p[1].x == Approx(1.0));
  CHECK(p[1].y == Approx(0.0));
  CHECK(p[2].x == Approx(0.0));
  CHECK(p[2].y == Approx(1.0));

  SUBCASE("isometry under rotation") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
      const TriMesh r = transformed(t, fixture::random_rigid(rng));
      const auto q = project_to_plane(r, 0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(dist2(q[i], q[j]) - dist2(p[i], p[j])) < 1e-9);
    }
  }

  SUBCASE("collinear face is degenerate") {
    const TriMesh c = fixture::single_triangle({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
    try {
      project_to_plane(c, 0);
      FAIL("expected DegenerateFace");
    } catch (const MeshError& e) {
      CHECK(e.kind() == MeshError::Kind::DegenerateFace);
    }
    CHECK(face_area(c, 0) == 0.0);
  }
}

TEST_CASE("face area") {
  CHECK(face_area(fixture::single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), 0) == Approx(0.5).epsilon(1e-15));
  TriMesh square;
  square.add_vertex({0, 0, 0});
  square.add_vertex({1, 0, 0});
  square.add_vertex({1, 1, 0});
  square.add_vertex({0, 1, 0});
  square.add_face({0, 1, 2, 3});
  CHECK(face_area(square, 0) == Approx(1.0).epsilon(1e-15));

  const TriMesh xz = fixture::single_triangle({0, 0, 0}, {2, 0, 0}, {0, 0, 3});
  const double expected = oracle::triangle_area({0, 0, 0}, {2, 0, 0}, {0, 0, 3});
  CHECK(expected == 3.0);
  CHECK(face_area(xz, 0) == Approx(expected).epsilon(1e-15));
}

TEST_CASE("shoelace agrees with the cross product on random triangles") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int k = 0; k < 2000; ++k) {
    const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    const double expected = oracle::triangle_area(a, b, c);
    CHECK(std::abs(face_area(fixture::single_triangle(a, b, c), 0) - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("area isometry and scaling") {
  const TriMesh sphere = synth::icosphere(3.0, 2);
  std::mt19937_64 rng(3);
  const RigidTransform t = fixture::random_rigid(rng);
  const TriMesh moved = transformed(sphere, t);
  const TriMesh big = scaled(sphere, 2.5);
  for (FaceId f = 0; f < sphere.face_count(); ++f) {
    const double a = face_area(sphere, f);
    CHECK(std::abs(face_area(moved, f) - a) <= 1e-9 * a);
    CHECK(std::abs(face_area(big, f) - 6.25 * a) <= 1e-9 * 6.25 * a);
    CHECK(distance(face_centroid(moved, f), t.apply(face_centroid(sphere, f))) < 1e-9);
  }
}

TEST_CASE("whole-mesh statistics") {
  const TriMesh cube = fixture::unit_cube();
  CHECK(mesh_total_area(cube) == Approx(6.0).epsilon(1e-14));
  CHECK(is_watertight(cube));
  CHECK(mesh_volume(cube) == Approx(1.0).epsilon(1e-14));

  const TriMesh tri = fixture::single_triangle({0, 0, 0}, {2, 0, 0}, {0, 5, 1});
  CHECK(mesh_total_area(tri) == face_area(tri, 0));

  SUBCASE("icosphere 5120 faces") {
    const TriMesh s = synth::icosphere(10.0, 4);
    REQUIRE(s.face_count() == 5120);
    const double area = mesh_total_area(s);
    const double volume = mesh_volume(s);
    const double area_truth = 4.0 * std::numbers::pi * 100.0;
    const double volume_truth = 4.0 / 3.0 * std::numbers::pi * 1000.0;
    CHECK(area < area_truth);  // inscribed polyhedron
    CHECK(std::abs(area - area_truth) / area_truth < 0.005);
    CHECK(volume < volume_truth);
    CHECK(std::abs(volume - volume_truth) / volume_truth < 0.01);
    // Independent sum over the cross-product oracle.
    double oracle_area = 0.0;
    for (FaceId f = 0; f < s.face_count(); ++f) {
      const auto ids = s.face(f);
      oracle_area += oracle::triangle_area(s.vertex(ids[0]), s.vertex(ids[1]), s.vertex(ids[2]));
    }
    CHECK(area == Approx(oracle_area).epsilon(1e-12));
  }

  SUBCASE("open half cube") {
    TriMesh open;
    for (const Point3& p : cube.vertices()) open.add_vertex(p);
    for (FaceId f = 0; f < 6; ++f) open.add_face(cube.face(f));
    CHECK_FALSE(is_watertight(open));
    try {
      mesh_volume(open);
      FAIL("expected NotWatertight");
    } catch (const MeshError& e) {
      CHECK(e.kind() == MeshError::Kind::NotWatertight);
    }
  }

  SUBCASE("inconsistent winding is not watertight") {
    TriMesh flipped;
    for (const Point3& p : cube.vertices()) flipped.add_vertex(p);
    for (FaceId f = 0; f < cube.face_count(); ++f) {
      const auto ids = cube.face(f);
      if (f == 0) flipped.add_face({ids[0], ids[2], ids[1]});
      else flipped.add_face(ids);
    }
    CHECK_FALSE(is_watertight(flipped));
  }
}

TEST_CASE("weld_vertices") {
  const auto two_triangles = [](double offset) {
    TriMesh m;
    m.add_vertex({0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({0, 1, 0});
    m.add_face({0, 1, 2});
    const auto b = m.add_vertex({1 + offset, 0, 0});
    const auto c = m.add_vertex({0, 1 + offset, 0});
    const auto d = m.add_vertex({1, 1, 0});
    m.add_face({b, d, c});
    return m;
  };

  SUBCASE("bitwise-equal shared vertices, epsilon 0") {
    const WeldResult w = weld_vertices(two_triangles(0.0), 0.0);
    CHECK(w.mesh.vertex_count() == 4);
    CHECK(w.mesh.face_count() == 2);
    CHECK(w.dropped_faces == 0);
  }
  SUBCASE("offset 1e-6 within epsilon 1e-4") {
    const WeldResult w = weld_vertices(two_triangles(1e-6), 1e-4);
    CHECK(w.mesh.vertex_count() == 4);
  }
  SUBCASE("offset beyond epsilon is kept") {
    CHECK(weld_vertices(two_triangles(1e-3), 1e-4).mesh.vertex_count() == 6);
    CHECK(weld_vertices(two_triangles(1e-6), 0.0).mesh.vertex_count() == 6);
  }
  SUBCASE("sliver collapses and is dropped") {
    const TriMesh sliver = fixture::single_triangle({0, 0, 0}, {1e-6, 0, 0}, {0, 1, 0});
    const WeldResult w = weld_vertices(sliver, 1e-4);
    CHECK(w.mesh.face_count() == 0);
    CHECK(w.dropped_faces == 1);
  }
  SUBCASE("negative zero merges with zero") {
    TriMesh m;
    m.add_vertex({0.0, 0, 0});
    m.add_vertex({1, 0, 0});
    m.add_vertex({0, 1, 0});
    m.add_vertex({-0.0, 0, 0});
    m.add_vertex({0, -1, 0});
    m.add_face({0, 1, 2});
    m.add_face({3, 4, 1});
    CHECK(weld_vertices(m, 0.0).mesh.vertex_count() == 4);
  }
  SUBCASE("idempotent") {
    std::mt19937_64 rng(9);
    for (const double eps : {0.0, 1e-5, 0.05, 0.3}) {
      const TriMesh soup = oracle::random_soup(rng, 400, 2.0, true);
      const WeldResult once = weld_vertices(soup, eps);
      const WeldResult twice = weld_vertices(once.mesh, eps);
      CHECK(twice.mesh.vertex_count() == once.mesh.vertex_count());
      CHECK(twice.mesh.face_count() == once.mesh.face_count());
      CHECK(twice.dropped_faces == 0);
    }
  }
  SUBCASE("no two welded vertices closer than epsilon") {
    std::mt19937_64 rng(10);
    const TriMesh soup = oracle::random_soup(rng, 300, 1.0, true);
    const double eps = 0.02;
    const TriMesh w = weld_vertices(soup, eps).mesh;
    for (VertexId i = 0; i < w.vertex_count(); ++i)
      for (VertexId j = i + 1; j < w.vertex_count(); ++j) CHECK(distance(w.vertex(i), w.vertex(j)) > eps);
  }
}

TEST_CASE("connected_components") {
  TriMesh m;
  for (const Point3& p : std::initializer_list<Point3>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 1, 0}, {2, 2, 0},
                                                     {5, 5, 5}, {6, 5, 5}, {5, 6, 5}})
    m.add_vertex(p);
  m.add_face({0, 1, 2});  // 0
  m.add_face({1, 3, 2});  // 1 shares an edge with 0
  m.add_face({3, 4, 5});  // 2 shares only vertex 3 with 1
  m.add_face({6, 7, 8});  // 3 disjoint

  const std::vector<FaceId> edge_pair{0, 1};
  CHECK(connected_components(m, edge_pair).components.size() == 1);
  const std::vector<FaceId> vertex_pair{1, 2};
  CHECK(connected_components(m, vertex_pair).components.size() == 1);
  const std::vector<FaceId> disjoint{0, 3};
  CHECK(connected_components(m, disjoint).components.size() == 2);
  CHECK(connected_components(m, std::vector<FaceId>{}).components.empty());

  const std::vector<FaceId> all{3, 2, 1, 0, 2};
  const SubMeshPartition p = connected_components(m, all);
  REQUIRE(p.components.size() == 2);
  CHECK(p.components[0] == std::vector<FaceId>{0, 1, 2});
  CHECK(p.components[1] == std::vector<FaceId>{3});
}

TEST_CASE("connected_components is a disjoint cover") {
  const TriMesh s = synth::icosphere(5.0, 3);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FaceId> subset;
    std::bernoulli_distribution keep(0.2 + 0.03 * trial);
    for (FaceId f = 0; f < s.face_count(); ++f)
      if (keep(rng)) subset.push_back(f);
    const SubMeshPartition p = connected_components(s, subset);
    std::vector<FaceId> joined;
    for (const auto& c : p.components) {
      CHECK(!c.empty());
      joined.insert(joined.end(), c.begin(), c.end());
    }
    std::sort(joined.begin(), joined.end());
    CHECK(joined == subset);
  }
}
