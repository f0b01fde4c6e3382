#pragma once

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "csa/engine.hpp"
#include "csa/mesh.hpp"

namespace csa {

/// Parses an STL stream, rescales it to millimeters and welds it. This is the
/// one loading path shared by the command line and the HTTP service.
TriMesh prepare_mesh(std::string_view stl_bytes, double unit_scale, double weld_epsilon_mm);

struct ReportContext {
  double unit_scale = 1.0;
  double cap_mm = kDefaultCapMm;
};

/// Machine-readable result. The `tumor_*` fields describe the measured mesh,
/// which `measured_mesh` names (it is the organ only when that has fewer faces).
nlohmann::json result_to_json(const CsaResult& result, const ReportContext& context);

/// Header line plus one row of the scalar fields of result_to_json.
std::string result_to_csv(const CsaResult& result, const ReportContext& context);

/// Sorted distances below the cap together with the detected knee. When the
/// result used an override the knee is still detected, for display.
nlohmann::json distribution_to_json(std::span<const double> distances, const CsaResult& result, double cap_mm);

/// {face_count, vertex_count, total_area, volume|null, bbox:{min,max}}
nlohmann::json mesh_summary(const TriMesh& mesh);

/// {vertices:[x,y,z,...], faces:[a,b,c,...], face_count, vertex_count}
nlohmann::json mesh_to_json(const TriMesh& mesh);

}  // namespace csa
