#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csa/engine.hpp"
#include "csa/mesh.hpp"

namespace csa::synth {

class InvalidGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Organ block. Its top face lies on the cut plane, it is centred on the z
/// axis and extends `depth` below the plane.
struct BoxDims {
  double size_x = 0.0;
  double size_y = 0.0;
  double depth = 0.0;
};

struct PairDescriptor {
  std::string shape;                     // "sphere" | "ellipsoid"
  std::map<std::string, double> params;  // shape parameters in mm / radians
  int subdiv = 0;
};

struct SyntheticPair {
  std::string id;
  TriMesh organ;
  TriMesh tumor;
  double ground_truth_csa = 0.0;
  PairDescriptor descriptor;
};

/// Recursively subdivided icosahedron with `20 * 4^subdiv` faces.
TriMesh icosphere(double radius, int subdiv);

/// Sphere of radius r sunk to depth h into the organ block. Truth is the
/// lateral cap area 2*pi*r*h. `seed` only perturbs the organ's internal
/// triangulation of the indentation.
SyntheticPair generate_sphere_pair(double r, double h, int subdiv, std::optional<BoxDims> box = std::nullopt,
                                   std::uint64_t seed = 1);

/// Ellipsoid with semi-axes (a, b, c), rotated by `yaw` about z, sunk up to
/// the plane z = z0 (so -c < z0 < c). Truth comes from quadrature.
SyntheticPair generate_ellipsoid_pair(double a, double b, double c, double z0, int subdiv,
                                      std::optional<BoxDims> box = std::nullopt, double yaw = 0.0,
                                      std::uint64_t seed = 1);

struct QuadratureReport {
  double value = 0.0;
  double coarse_value = 0.0;  // same rule at half the resolution per axis
  std::size_t samples = 0;
  double relative_change = 0.0;
};

/// Surface area of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 below z0,
/// midpoint rule in (theta, phi) refined until two successive resolutions
/// agree to 1e-7 relative.
QuadratureReport ellipsoid_area_below(double a, double b, double c, double z0);

/// Twenty pairs (spheres and ellipsoids) fully determined by `seed`.
std::vector<SyntheticPair> generate_suite(std::uint64_t seed, int base_subdiv = 4);

/// Writes organ/tumour binary STLs plus manifest.json into `dir`.
void write_suite(const std::vector<SyntheticPair>& suite, const std::filesystem::path& dir);

/// Reads manifest.json and its STLs back (parsed and welded). Throws
/// std::runtime_error when the manifest is missing or empty.
std::vector<SyntheticPair> load_suite(const std::filesystem::path& dir, double weld_epsilon_mm = 1e-5);

struct BenchRow {
  std::string id;
  double truth = 0.0;
  double computed = 0.0;
  double percent_error = 0.0;
  bool insufficient_contact = false;
  std::optional<std::string> failure;
};

struct BenchAggregate {
  std::size_t completed = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<std::string> outliers;
  std::size_t within_5_percent = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchAggregate aggregate;
};

BenchReport run_benchmark(const std::vector<SyntheticPair>& suite, const CsaConfig& config = {});

/// Recomputes the box-plot aggregate from the completed rows.
BenchAggregate aggregate_rows(const std::vector<BenchRow>& rows);

/// Linear-interpolation quantile of an ascending sample (q in [0, 1]).
double quantile_sorted(const std::vector<double>& sorted, double q);

std::string report_csv(const BenchReport& report);
std::string report_json(const BenchReport& report);

}  // namespace csa::synth
