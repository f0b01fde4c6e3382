#include <algorithm>
#include <numbers>

#include "csa/engine.hpp"

namespace csa {

RefinedCsa refine_csa(const TriMesh& smaller, std::span<const FaceId> csa_ids, std::span<const double> distances) {
  RefinedCsa out;
  out.face_ids.assign(csa_ids.begin(), csa_ids.end());
  std::sort(out.face_ids.begin(), out.face_ids.end());
  out.face_ids.erase(std::unique(out.face_ids.begin(), out.face_ids.end()), out.face_ids.end());

  std::vector<bool> in_csa(smaller.face_count(), false);
  for (const FaceId f : out.face_ids) in_csa[f] = true;
  std::vector<FaceId> complement;
  complement.reserve(smaller.face_count() - out.face_ids.size());
  for (FaceId f = 0; f < smaller.face_count(); ++f)
    if (!in_csa[f]) complement.push_back(f);

  const SubMeshPartition parts = connected_components(smaller, complement);
  out.complement_components = parts.components.size();
  if (parts.components.size() <= 1) return out;

  // The component holding the farthest face is the true non-contact surface.
  std::size_t keep = 0;
  double farthest = -1.0;
  for (std::size_t c = 0; c < parts.components.size(); ++c) {
    double t = 0.0;
    for (const FaceId f : parts.components[c]) t = std::max(t, distances[f]);
    if (t > farthest) {
      farthest = t;
      keep = c;
    }
  }
  for (std::size_t c = 0; c < parts.components.size(); ++c) {
    if (c == keep) continue;
    out.face_ids.insert(out.face_ids.end(), parts.components[c].begin(), parts.components[c].end());
    ++out.absorbed_components;
  }
  std::sort(out.face_ids.begin(), out.face_ids.end());
  return out;
}

double compute_csa_area(const TriMesh& smaller, std::span<const FaceId> csa_ids) {
  double area = 0.0;
  for (const FaceId f : csa_ids) area += face_area(smaller, f);
  return area;
}

double hsieh_estimate(double radius_mm, double depth_mm) { return 2.0 * std::numbers::pi * radius_mm * depth_mm; }

CsaResult evaluate_csa(const TriMesh& measured, bool measured_is_tumor, std::size_t other_face_count,
                       std::span<const double> distances, const CsaConfig& config) {
  CsaResult result;
  result.measured_is_tumor = measured_is_tumor;
  result.stats.smaller_total_area = mesh_total_area(measured);
  try {
    result.stats.smaller_volume = mesh_volume(measured);
  } catch (const MeshError& e) {
    if (e.kind() != MeshError::Kind::NotWatertight) throw;
  }
  result.stats.face_count_tumor = measured_is_tumor ? measured.face_count() : other_face_count;
  result.stats.face_count_organ = measured_is_tumor ? other_face_count : measured.face_count();

  if (config.threshold_override_mm) {
    result.threshold_overridden = true;
    result.tau = *config.threshold_override_mm;
  } else {
    try {
      result.threshold = find_threshold(distances, config.cap_mm);
      result.tau = result.threshold->tau;
    } catch (const InsufficientContact&) {
      result.insufficient_contact = true;
      return result;
    }
  }

  result.csa_face_ids_pre_refinement = define_csa(distances, result.tau);
  if (config.refine) {
    RefinedCsa refined = refine_csa(measured, result.csa_face_ids_pre_refinement, distances);
    result.refinement_applied = true;
    result.discarded_component_count = refined.absorbed_components;
    result.csa_face_ids = std::move(refined.face_ids);
  } else {
    result.csa_face_ids = result.csa_face_ids_pre_refinement;
  }
  result.csa_area = compute_csa_area(measured, result.csa_face_ids);
  return result;
}

DistanceVector tumor_organ_distances(const TriMesh& organ, const TriMesh& tumor, double cap_mm) {
  const FaceCentroids tumor_centroids = all_centroids(tumor);
  const FaceCentroids organ_centroids = all_centroids(organ);
  return min_distances(tumor_centroids, organ_centroids, cap_mm);
}

CsaResult compute_csa(const TriMesh& organ, const TriMesh& tumor, const CsaConfig& config) {
  const DistanceVector d = tumor_organ_distances(organ, tumor, config.cap_mm);
  const TriMesh& measured = d.small_is_first ? tumor : organ;
  const TriMesh& other = d.small_is_first ? organ : tumor;
  return evaluate_csa(measured, d.small_is_first, other.face_count(), d.distances, config);
}

}  // namespace csa
