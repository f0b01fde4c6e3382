#include "csa/report.hpp"

#include <algorithm>
#include <sstream>

#include "csa/mesh_io.hpp"

namespace csa {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json line_json(const LineFit& line) { return {{"slope", line.slope}, {"intercept", line.intercept}}; }

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace

TriMesh prepare_mesh(std::string_view stl_bytes, double unit_scale, double weld_epsilon_mm) {
  TriMesh mesh = parse_stl(stl_bytes);
  mesh.set_unit_scale(unit_scale);
  return weld_vertices(to_millimeters(mesh), weld_epsilon_mm).mesh;
}

json result_to_json(const CsaResult& result, const ReportContext& context) {
  json out;
  out["csa_area_mm2"] = result.csa_area;
  out["tumor_total_area_mm2"] = result.stats.smaller_total_area;
  out["tumor_volume_mm3"] = optional_number(result.stats.smaller_volume);
  out["threshold_mm"] = result.insufficient_contact ? json(nullptr) : json(result.tau);
  out["split_index"] = result.threshold ? json(result.threshold->split_index) : json(nullptr);
  out["face_count_tumor"] = result.stats.face_count_tumor;
  out["face_count_organ"] = result.stats.face_count_organ;
  out["csa_face_ids"] = result.csa_face_ids;
  out["pre_refinement_face_ids"] = result.csa_face_ids_pre_refinement;
  out["refinement_applied"] = result.refinement_applied;
  out["insufficient_contact"] = result.insufficient_contact;
  out["unit_scale"] = context.unit_scale;
  out["cap_mm"] = context.cap_mm;
  out["threshold_overridden"] = result.threshold_overridden;
  out["discarded_component_count"] = result.discarded_component_count;
  out["measured_mesh"] = result.measured_is_tumor ? "tumor" : "organ";
  return out;
}

std::string result_to_csv(const CsaResult& result, const ReportContext& context) {
  const json j = result_to_json(result, context);
  static const char* const columns[] = {"csa_area_mm2",     "tumor_total_area_mm2", "tumor_volume_mm3",
                                        "threshold_mm",     "split_index",          "face_count_tumor",
                                        "face_count_organ", "refinement_applied",   "insufficient_contact",
                                        "unit_scale",       "cap_mm",               "threshold_overridden",
                                        "discarded_component_count", "measured_mesh"};
  std::ostringstream header;
  std::ostringstream row;
  bool first = true;
  for (const char* column : columns) {
    if (!first) {
      header << ',';
      row << ',';
    }
    first = false;
    header << column;
    const json& v = j.at(column);
    if (v.is_null()) continue;
    row << (v.is_string() ? v.get<std::string>() : v.dump());
  }
  header << ",csa_face_count\n";
  row << ',' << result.csa_face_ids.size() << '\n';
  return header.str() + row.str();
}

json distribution_to_json(std::span<const double> distances, const CsaResult& result, double cap_mm) {
  std::optional<ThresholdResult> detected = result.threshold;
  if (!detected) {
    try {
      detected = find_threshold(distances, cap_mm);
    } catch (const InsufficientContact&) {
    }
  }

  json out;
  out["cap_mm"] = cap_mm;
  out["tau"] = result.insufficient_contact ? json(nullptr) : json(result.tau);
  out["threshold_overridden"] = result.threshold_overridden;
  if (detected) {
    out["sorted"] = detected->sorted;
    out["split_index"] = detected->split_index;
    out["detected_tau"] = detected->tau;
    out["fit_lines"] = json::array({line_json(detected->fit_lines[0]), line_json(detected->fit_lines[1])});
    out["cumulative_errors"] = detected->cumulative_errors;
  } else {
    std::vector<double> sorted;
    for (const double d : distances)
      if (d < cap_mm) sorted.push_back(d);
    std::sort(sorted.begin(), sorted.end());
    out["sorted"] = sorted;
    out["split_index"] = nullptr;
    out["detected_tau"] = nullptr;
    out["fit_lines"] = nullptr;
    out["cumulative_errors"] = json::array();
  }
  return out;
}

json mesh_summary(const TriMesh& mesh) {
  json out;
  out["face_count"] = mesh.face_count();
  out["vertex_count"] = mesh.vertex_count();
  out["total_area"] = mesh_total_area(mesh);
  try {
    out["volume"] = mesh_volume(mesh);
  } catch (const MeshError& e) {
    if (e.kind() != MeshError::Kind::NotWatertight) throw;
    out["volume"] = nullptr;
  }
  const BoundingBox box = bounding_box(mesh);
  out["bbox"] = {{"min", point_json(box.min)}, {"max", point_json(box.max)}};
  return out;
}

json mesh_to_json(const TriMesh& mesh) {
  std::vector<double> coords;
  coords.reserve(3 * mesh.vertex_count());
  for (const Point3& p : mesh.vertices()) {
    coords.push_back(p.x);
    coords.push_back(p.y);
    coords.push_back(p.z);
  }
  // Triangles are sent flat; any larger polygon is fanned so that the viewer
  // can map triangle k back to face face_of_triangle[k].
  std::vector<VertexId> indices;
  std::vector<FaceId> face_of_triangle;
  bool all_triangles = true;
  for (FaceId f = 0; f < mesh.face_count(); ++f) {
    const auto ids = mesh.face(f);
    all_triangles &= ids.size() == 3;
    for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
      indices.insert(indices.end(), {ids[0], ids[k], ids[k + 1]});
      face_of_triangle.push_back(f);
    }
  }
  json out = {{"vertex_count", mesh.vertex_count()},
              {"face_count", mesh.face_count()},
              {"vertices", coords},
              {"faces", indices}};
  if (!all_triangles) out["face_of_triangle"] = face_of_triangle;
  return out;
}

}  // namespace csa
