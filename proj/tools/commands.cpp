#include "commands.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csa/mesh_io.hpp"
#include "csa/report.hpp"
#include "csa/synth.hpp"

namespace csa::cli {

namespace fs = std::filesystem;

namespace {

struct ComputeOptions {
  std::string organ_path;
  std::string tumor_path;
  std::string out_path;
  std::string vis_dir;
  double unit_scale = 1.0;
  double cap_mm = kDefaultCapMm;
  double weld_epsilon_mm = 1e-5;
  std::optional<double> threshold_override_mm;
  bool no_refine = false;
  std::string format = "json";
};

struct BenchOptions {
  bool generate = false;
  std::uint64_t seed = 1;
  std::string suite_dir;
  int subdiv = 4;
  std::string out_dir = "bench_out";
};

TriMesh load_mesh(const std::string& path, double unit_scale, double weld_epsilon_mm) {
  TriMesh mesh = read_stl_file(path);
  mesh.set_unit_scale(unit_scale);
  mesh = weld_vertices(to_millimeters(mesh), weld_epsilon_mm).mesh;
  if (mesh.empty()) throw MeshError(MeshError::Kind::EmptyMesh, path + ": no faces left after welding");
  return mesh;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) out << text;
  else write_file(path, text);
}

int cmd_compute(const ComputeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const TriMesh organ = load_mesh(o.organ_path, o.unit_scale, o.weld_epsilon_mm);
    const TriMesh tumor = load_mesh(o.tumor_path, o.unit_scale, o.weld_epsilon_mm);

    CsaConfig config;
    config.cap_mm = o.cap_mm;
    config.threshold_override_mm = o.threshold_override_mm;
    config.refine = !o.no_refine;
    const CsaResult result = compute_csa(organ, tumor, config);

    const ReportContext context{o.unit_scale, o.cap_mm};
    emit(o.format == "csv" ? result_to_csv(result, context) : result_to_json(result, context).dump(2) + "\n",
         o.out_path, out);

    if (!o.vis_dir.empty()) {
      fs::create_directories(o.vis_dir);
      const std::vector<FaceId> none;
      export_ply_colored(tumor, result.measured_is_tumor ? result.csa_face_ids : none, fs::path(o.vis_dir) / "tumor.ply");
      export_ply_colored(organ, result.measured_is_tumor ? none : result.csa_face_ids, fs::path(o.vis_dir) / "organ.ply");
    }

    if (result.insufficient_contact) {
      err << "no contact: fewer than four faces lie within " << o.cap_mm << " mm of the other mesh\n";
      return kExitNoContact;
    }
    if (result.csa_face_ids.empty()) {
      err << "no contact: no face lies below the threshold\n";
      return kExitNoContact;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  try {
    fs::path suite_dir = o.suite_dir;
    if (o.generate) {
      if (suite_dir.empty()) suite_dir = fs::path(o.out_dir) / "suite";
      synth::write_suite(synth::generate_suite(o.seed, o.subdiv), suite_dir);
    } else if (suite_dir.empty()) {
      err << "error: bench needs --suite DIR or --generate\n";
      return kExitFailure;
    }

    const std::vector<synth::SyntheticPair> suite = synth::load_suite(suite_dir);
    const synth::BenchReport report = synth::run_benchmark(suite);

    fs::create_directories(o.out_dir);
    write_file(fs::path(o.out_dir) / "report.csv", synth::report_csv(report));
    write_file(fs::path(o.out_dir) / "report.json", synth::report_json(report));

    const synth::BenchAggregate& a = report.aggregate;
    out << a.completed << "/" << report.rows.size() << " pairs completed; median error " << a.median << "%, IQR ["
        << a.q1 << ", " << a.q3 << "]%, " << a.within_5_percent << " within 5%, " << a.outliers.size()
        << " outliers\n";
    for (const synth::BenchRow& row : report.rows)
      if (row.failure) err << row.id << ": " << *row.failure << '\n';
    return a.completed == 0 ? kExitFailure : kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contact surface area between an organ and a tumour mesh", "csa"};
  app.require_subcommand(1);

  ComputeOptions c;
  CLI::App* compute = app.add_subcommand("compute", "Compute the contact surface area of an organ/tumour STL pair");
  compute->add_option("ORGAN", c.organ_path, "Organ STL")->required();
  compute->add_option("TUMOR", c.tumor_path, "Tumour STL")->required();
  compute->add_option("--out", c.out_path, "Write the report here instead of stdout");
  compute->add_option("--vis", c.vis_dir, "Write colored PLY files of both meshes into DIR");
  compute->add_option("--unit-scale", c.unit_scale, "Millimeters per model unit")->check(CLI::PositiveNumber);
  compute->add_option("--cap-mm", c.cap_mm, "Distance cap for the threshold search")->check(CLI::PositiveNumber);
  compute->add_option("--weld-epsilon", c.weld_epsilon_mm, "Vertex weld tolerance in mm")->check(CLI::NonNegativeNumber);
  compute->add_option("--threshold-override", c.threshold_override_mm, "Use this threshold (mm) instead of detecting it")
      ->check(CLI::NonNegativeNumber);
  compute->add_flag("--no-refine", c.no_refine, "Skip the refinement step");
  compute->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  BenchOptions b;
  CLI::App* bench = app.add_subcommand("bench", "Run the synthetic benchmark");
  bench->add_flag("--generate", b.generate, "Generate the suite from --seed");
  bench->add_option("--seed", b.seed, "Suite seed");
  bench->add_option("--suite", b.suite_dir, "Suite directory (manifest.json + STL files)");
  bench->add_option("--subdiv", b.subdiv, "Base icosphere subdivision of generated pairs")->check(CLI::Range(1, 7));
  bench->add_option("--out", b.out_dir, "Directory for report.csv and report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }

  if (compute->parsed()) return cmd_compute(c, out, err);
  return cmd_bench(b, out, err);
}

}  // namespace csa::cli
