#include <doctest.h>

#include <cmath>
#include <numbers>

#include "csa/mesh_io.hpp"
#include "csa/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace csa;
using namespace csa::synth;
using doctest::Approx;

namespace {

/// Closed-form surface area of the oblate spheroid with semi-axes a = b > c.
double oblate_area(double a, double c) {
  const double e = std::sqrt(1.0 - c * c / (a * a));
  return 2.0 * std::numbers::pi * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
}

double relative_error(const SyntheticPair& pair) {
  return (compute_csa(pair.organ, pair.tumor).csa_area - pair.ground_truth_csa) / pair.ground_truth_csa;
}

}  // namespace

TEST_CASE("icosphere") {
  for (int s = 0; s <= 4; ++s) {
    const TriMesh m = icosphere(2.0, s);
    CHECK(m.face_count() == 20u * (1u << (2 * s)));
    CHECK(is_watertight(m));
    for (const Point3& p : m.vertices()) CHECK(norm(p) == Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("sphere pair truth and validation") {
  CHECK(generate_sphere_pair(10, 10, 3).ground_truth_csa == Approx(628.319).epsilon(1e-6));
  CHECK(generate_sphere_pair(10, 20, 3).ground_truth_csa == Approx(1256.64).epsilon(1e-5));
  CHECK_THROWS_AS(generate_sphere_pair(10, 25, 3), InvalidGeometry);
  CHECK_THROWS_AS(generate_sphere_pair(10, 0, 3), InvalidGeometry);
  CHECK_THROWS_AS(generate_sphere_pair(-1, 1, 3), InvalidGeometry);
  CHECK_THROWS_AS(generate_sphere_pair(10, 5, 3, BoxDims{5, 5, 20}), InvalidGeometry);
  CHECK_THROWS_AS(generate_sphere_pair(10, 5, 3, BoxDims{40, 40, 2}), InvalidGeometry);
}

TEST_CASE("sphere pair geometry") {
  for (const double h : {2.0, 5.0, 10.0, 15.0, 20.0}) {
    CAPTURE(h);
    const SyntheticPair p = generate_sphere_pair(10.0, h, 3);
    CHECK(is_watertight(p.tumor));
    CHECK(is_watertight(p.organ));
    CHECK(mesh_volume(p.organ) > 0.0);
    CHECK(p.organ.face_count() > p.tumor.face_count());
    CHECK(p.descriptor.shape == "sphere");
    CHECK(p.descriptor.subdiv == 3);
    // The tumour stays on its sphere except for vertices moved onto the cut plane.
    const double plane = bounding_box(p.organ).max.z;
    for (const Point3& v : p.tumor.vertices())
      if (v.z != plane) CHECK(norm(v) == Approx(10.0).epsilon(1e-12));
  }
}

TEST_CASE("sphere pair converges with resolution") {
  double previous = 1.0;
  for (int s = 3; s <= 5; ++s) {
    const double e = std::abs(relative_error(generate_sphere_pair(10.0, 5.0, s)));
    CAPTURE(s);
    CHECK(e <= previous + 0.005);
    previous = e;
  }
}

TEST_CASE("ellipsoid quadrature") {
  SUBCASE("sphere reduction") {
    for (const double h : {3.0, 10.0, 17.0}) {
      const QuadratureReport q = ellipsoid_area_below(10, 10, 10, h - 10.0);
      CHECK(q.value == Approx(oracle::spherical_cap_area(10.0, h)).epsilon(1e-3));
      CHECK(q.samples >= 1'000'000);
      CHECK(q.relative_change < 1e-7);
    }
  }
  SUBCASE("half of an oblate spheroid") {
    const QuadratureReport q = ellipsoid_area_below(10, 10, 5, 0.0);
    CHECK(q.value == Approx(oblate_area(10, 5) / 2.0).epsilon(1e-6));
  }
  SUBCASE("limit at the bottom") {
    CHECK(ellipsoid_area_below(8, 6, 5, -5.0 + 1e-6).value < 1e-3);
    CHECK(ellipsoid_area_below(8, 6, 5, -5.0).value == 0.0);
  }
  SUBCASE("axis swap symmetry") {
    CHECK(ellipsoid_area_below(7, 12, 9, 2.0).value == Approx(ellipsoid_area_below(12, 7, 9, 2.0).value).epsilon(1e-9));
  }
}

TEST_CASE("ellipsoid pair") {
  const SyntheticPair p = generate_ellipsoid_pair(10, 10, 10, -5.0, 3);
  CHECK(p.ground_truth_csa == Approx(oracle::spherical_cap_area(10, 5)).epsilon(1e-3));
  const SyntheticPair q = generate_ellipsoid_pair(12, 8, 6, 1.0, 4, std::nullopt, 0.7);
  CHECK(is_watertight(q.tumor));
  CHECK(is_watertight(q.organ));
  CHECK(q.ground_truth_csa == ellipsoid_area_below(12, 8, 6, 1.0).value);
  CHECK(std::abs(relative_error(q)) < 0.05);
  CHECK_THROWS_AS(generate_ellipsoid_pair(10, 10, 5, 5.0, 3), InvalidGeometry);
  CHECK_THROWS_AS(generate_ellipsoid_pair(10, 10, 5, -6.0, 3), InvalidGeometry);
}

TEST_CASE("suite generation") {
  const std::vector<SyntheticPair> a = generate_suite(7);
  const std::vector<SyntheticPair> b = generate_suite(7);
  REQUIRE(a.size() == 20);
  REQUIRE(b.size() == 20);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].ground_truth_csa > 0.0);
    CHECK(a[k].id == b[k].id);
    CHECK(serialize_stl_binary(a[k].organ) == serialize_stl_binary(b[k].organ));
    CHECK(serialize_stl_binary(a[k].tumor) == serialize_stl_binary(b[k].tumor));
  }
  CHECK(a.front().id == "pair_01");
  CHECK(a.back().id == "pair_20");
  const std::vector<SyntheticPair> c = generate_suite(8);
  CHECK(c[0].ground_truth_csa != a[0].ground_truth_csa);

  SUBCASE("benchmark properties") {
    const BenchReport report = run_benchmark(a);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CAPTURE(a[k].id);
      CHECK_FALSE(report.rows[k].failure.has_value());
      CHECK_FALSE(report.rows[k].insufficient_contact);
      const CsaResult r = compute_csa(a[k].organ, a[k].tumor);
      CHECK(std::includes(r.csa_face_ids.begin(), r.csa_face_ids.end(), r.csa_face_ids_pre_refinement.begin(),
                          r.csa_face_ids_pre_refinement.end()));
      std::vector<FaceId> complement;
      for (FaceId f = 0; f < a[k].tumor.face_count(); ++f)
        if (!std::binary_search(r.csa_face_ids.begin(), r.csa_face_ids.end(), f)) complement.push_back(f);
      CHECK(connected_components(a[k].tumor, complement).components.size() == 1);
    }
    CHECK(std::abs(report.aggregate.median) < 1.0);
    CHECK(report.aggregate.within_5_percent >= 15);
  }
}

TEST_CASE("suite error does not grow with resolution") {
  const double coarse = std::abs(run_benchmark(generate_suite(1, 4)).aggregate.median);
  const double fine = std::abs(run_benchmark(generate_suite(1, 5)).aggregate.median);
  CAPTURE(coarse);
  CAPTURE(fine);
  CHECK(fine <= coarse + 0.5);  // percentage points
}

TEST_CASE("suite round trip through disk") {
  const auto dir = fixture::temp_dir("suite");
  std::vector<SyntheticPair> suite = generate_suite(3, 3);
  suite.resize(3);
  write_suite(suite, dir);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "pair_01_organ.stl"));
  const std::vector<SyntheticPair> back = load_suite(dir);
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back[k].id == suite[k].id);
    CHECK(back[k].ground_truth_csa == suite[k].ground_truth_csa);
    CHECK(back[k].descriptor.shape == suite[k].descriptor.shape);
    CHECK(back[k].descriptor.subdiv == suite[k].descriptor.subdiv);
    CHECK(back[k].tumor.face_count() == suite[k].tumor.face_count());
    CHECK(back[k].organ.face_count() == suite[k].organ.face_count());
    CHECK(is_watertight(back[k].tumor));
  }
  std::filesystem::remove_all(dir);

  const auto empty = fixture::temp_dir("empty_suite");
  CHECK_THROWS_AS(load_suite(empty), std::runtime_error);
  write_file(empty / "manifest.json", "[]");
  CHECK_THROWS_AS(load_suite(empty), std::runtime_error);
  std::filesystem::remove_all(empty);
}

TEST_CASE("benchmark aggregate") {
  const std::vector<double> sorted{1, 2, 3, 4};
  CHECK(quantile_sorted(sorted, 0.5) == 2.5);
  CHECK(quantile_sorted(sorted, 0.25) == 1.75);
  CHECK(quantile_sorted(sorted, 0.0) == 1.0);
  CHECK(quantile_sorted(sorted, 1.0) == 4.0);

  std::vector<BenchRow> rows;
  const double errors[] = {-1.0, 0.0, 0.5, 1.0, 2.0, 40.0};
  for (int k = 0; k < 6; ++k) {
    BenchRow r;
    r.id = "p" + std::to_string(k);
    r.percent_error = errors[k];
    rows.push_back(r);
  }
  BenchRow failed;
  failed.id = "broken";
  failed.failure = "boom";
  rows.push_back(failed);

  const BenchAggregate a = aggregate_rows(rows);
  CHECK(a.completed == 6);
  CHECK(a.median == 0.75);
  CHECK(a.q1 == 0.125);
  CHECK(a.q3 == 1.75);
  CHECK(a.iqr == 1.625);
  CHECK(a.outliers == std::vector<std::string>{"p5"});
  CHECK(a.whisker_low == -1.0);
  CHECK(a.whisker_high == 2.0);
  CHECK(a.within_5_percent == 5);

  BenchReport report{rows, a};
  const std::string csv = report_csv(report);
  CHECK(csv.starts_with("id,truth,computed,percent_error\n"));
  CHECK(csv.find("broken,0,,\n") != std::string::npos);
  const std::string json = report_json(report);
  CHECK(json.find("\"failure\": \"boom\"") != std::string::npos);
  CHECK(json.find("\"median\": 0.75") != std::string::npos);
}
