#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "csa/geometry.hpp"
#include "csa/mesh.hpp"

namespace csa {

inline constexpr double kDefaultCapMm = 10.0;

/// Per-face minimum centroid-to-centroid distance for the mesh with fewer
/// faces. On a face-count tie the first argument is the measured mesh.
struct DistanceVector {
  std::vector<double> distances;
  bool small_is_first = true;
};

/// Nearest-centroid distances through a uniform grid over the larger set.
/// `cap_mm` sets the grid cell size; the result is the exact minimum either
/// way. Small inputs (< 256 faces on either side) use the brute-force path.
DistanceVector min_distances(std::span<const Point3> first, std::span<const Point3> second,
                             double cap_mm = kDefaultCapMm);

/// Direct O(N_p * N_q) scan. Kept as the reference the indexed path must
/// reproduce bit for bit.
DistanceVector min_distances_bruteforce(std::span<const Point3> first, std::span<const Point3> second);

/// Degree-1 least-squares line over rank abscissae.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  double at(double x) const { return slope * x + intercept; }
};

class InsufficientContact : public std::runtime_error {
 public:
  explicit InsufficientContact(std::size_t below_cap)
      : std::runtime_error("only " + std::to_string(below_cap) + " distances fall below the cap; at least 4 needed"),
        below_cap_(below_cap) {}

  std::size_t below_cap() const noexcept { return below_cap_; }

 private:
  std::size_t below_cap_;
};

/// Knee of the sorted distance distribution.
///
/// Ranks are 1-based throughout: `sorted[k]` has abscissa k + 1, and
/// `split_index` is the 1-based rank i of the last sample in the lower
/// segment, so tau == sorted[split_index - 1]. `cumulative_errors[k]` is the
/// error of candidate split i = k + 2.
struct ThresholdResult {
  double tau = 0.0;
  std::size_t split_index = 0;
  std::size_t capped_count = 0;
  std::vector<double> cumulative_errors;
  std::array<LineFit, 2> fit_lines{};
  std::vector<double> sorted;  // ascending, truncated below the cap
};

/// Fits a line to `values` placed at abscissae first_rank, first_rank + 1, ...
/// A single sample yields the horizontal line through it.
LineFit lsq_fit(std::span<const double> values, std::size_t first_rank);

/// Sorts, truncates to entries strictly below `cap_mm`, then scans every
/// split i in [2, F-1] for the pair of lines with the smallest summed
/// absolute deviation. Lowest index wins ties. Throws InsufficientContact
/// when fewer than four distances fall below the cap.
ThresholdResult find_threshold(std::span<const double> distances, double cap_mm = kDefaultCapMm);

/// Relative width of the band around tau treated as equal to tau.
inline constexpr double kTauTieTolerance = 1e-9;

/// { i : distances[i] < tau }, ascending. Distances within a relative
/// kTauTieTolerance of tau count as equal to it.
std::vector<FaceId> define_csa(std::span<const double> distances, double tau);

struct RefinedCsa {
  std::vector<FaceId> face_ids;  // ascending
  std::size_t complement_components = 0;
  std::size_t absorbed_components = 0;
};

/// Folds every non-contact component except the one holding the farthest
/// face back into the contact set.
RefinedCsa refine_csa(const TriMesh& smaller, std::span<const FaceId> csa_ids, std::span<const double> distances);

double compute_csa_area(const TriMesh& smaller, std::span<const FaceId> csa_ids);

/// Legacy estimate 2*pi*r*d from the maximum tumour radius and depth.
double hsieh_estimate(double radius_mm, double depth_mm);

struct CsaConfig {
  double cap_mm = kDefaultCapMm;
  std::optional<double> threshold_override_mm;
  bool refine = true;
};

struct CsaStats {
  double smaller_total_area = 0.0;
  std::optional<double> smaller_volume;
  std::size_t face_count_tumor = 0;
  std::size_t face_count_organ = 0;
};

struct CsaResult {
  std::vector<FaceId> csa_face_ids;
  std::vector<FaceId> csa_face_ids_pre_refinement;
  double csa_area = 0.0;
  double tau = 0.0;
  /// Present when the threshold was detected rather than overridden and
  /// enough contact existed to fit it.
  std::optional<ThresholdResult> threshold;
  bool threshold_overridden = false;
  bool insufficient_contact = false;
  bool refinement_applied = false;
  std::size_t discarded_component_count = 0;
  /// False when the organ had fewer faces and was therefore measured.
  bool measured_is_tumor = true;
  CsaStats stats;
};

/// Steps three to six of the pipeline on a precomputed distance vector.
/// `measured` is the mesh the distances index.
CsaResult evaluate_csa(const TriMesh& measured, bool measured_is_tumor, std::size_t other_face_count,
                       std::span<const double> distances, const CsaConfig& config);

/// The full pipeline. Both meshes must be welded and in millimeters.
CsaResult compute_csa(const TriMesh& organ, const TriMesh& tumor, const CsaConfig& config = {});

/// Distances between tumour and organ with the tumour as first argument, so
/// that a face-count tie measures the tumour.
DistanceVector tumor_organ_distances(const TriMesh& organ, const TriMesh& tumor, double cap_mm);

}  // namespace csa
