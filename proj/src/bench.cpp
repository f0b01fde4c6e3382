#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "csa/mesh_io.hpp"
#include "csa/synth.hpp"

namespace csa::synth {

using nlohmann::json;

void write_suite(const std::vector<SyntheticPair>& suite, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json manifest = json::array();
  for (const SyntheticPair& pair : suite) {
    const std::string organ_name = pair.id + "_organ.stl";
    const std::string tumor_name = pair.id + "_tumor.stl";
    write_file(dir / organ_name, serialize_stl_binary(pair.organ, pair.id + " organ"));
    write_file(dir / tumor_name, serialize_stl_binary(pair.tumor, pair.id + " tumor"));
    json params = json::object();
    for (const auto& [key, value] : pair.descriptor.params) params[key] = value;
    params["subdiv"] = pair.descriptor.subdiv;
    manifest.push_back({{"id", pair.id},
                        {"organ_stl", organ_name},
                        {"tumor_stl", tumor_name},
                        {"ground_truth_csa_mm2", pair.ground_truth_csa},
                        {"shape", pair.descriptor.shape},
                        {"params", params}});
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<SyntheticPair> load_suite(const std::filesystem::path& dir, double weld_epsilon_mm) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw std::runtime_error("no manifest.json in " + dir.string());
  const json manifest = json::parse(read_file(manifest_path));
  if (!manifest.is_array() || manifest.empty()) throw std::runtime_error("manifest " + manifest_path.string() + " lists no pairs");

  std::vector<SyntheticPair> suite;
  for (const json& entry : manifest) {
    SyntheticPair pair;
    pair.id = entry.at("id").get<std::string>();
    pair.ground_truth_csa = entry.at("ground_truth_csa_mm2").get<double>();
    pair.descriptor.shape = entry.value("shape", "");
    if (entry.contains("params")) {
      for (const auto& [key, value] : entry["params"].items()) {
        if (key == "subdiv") pair.descriptor.subdiv = value.get<int>();
        else pair.descriptor.params[key] = value.get<double>();
      }
    }
    pair.organ = weld_vertices(read_stl_file(dir / entry.at("organ_stl").get<std::string>()), weld_epsilon_mm).mesh;
    pair.tumor = weld_vertices(read_stl_file(dir / entry.at("tumor_stl").get<std::string>()), weld_epsilon_mm).mesh;
    suite.push_back(std::move(pair));
  }
  return suite;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BenchAggregate aggregate_rows(const std::vector<BenchRow>& rows) {
  BenchAggregate agg;
  std::vector<double> errors;
  for (const BenchRow& row : rows) {
    if (row.failure) continue;
    errors.push_back(row.percent_error);
    if (std::abs(row.percent_error) <= 5.0) ++agg.within_5_percent;
  }
  agg.completed = errors.size();
  if (errors.empty()) return agg;
  std::sort(errors.begin(), errors.end());
  agg.median = quantile_sorted(errors, 0.5);
  agg.q1 = quantile_sorted(errors, 0.25);
  agg.q3 = quantile_sorted(errors, 0.75);
  agg.iqr = agg.q3 - agg.q1;
  const double fence_low = agg.q1 - 1.5 * agg.iqr;
  const double fence_high = agg.q3 + 1.5 * agg.iqr;
  agg.whisker_low = agg.q1;
  agg.whisker_high = agg.q3;
  for (const double e : errors) {
    if (e >= fence_low) agg.whisker_low = std::min(agg.whisker_low, e);
    if (e <= fence_high) agg.whisker_high = std::max(agg.whisker_high, e);
  }
  for (const BenchRow& row : rows)
    if (!row.failure && (row.percent_error < fence_low || row.percent_error > fence_high)) agg.outliers.push_back(row.id);
  return agg;
}

BenchReport run_benchmark(const std::vector<SyntheticPair>& suite, const CsaConfig& config) {
  BenchReport report;
  for (const SyntheticPair& pair : suite) {
    BenchRow row;
    row.id = pair.id;
    row.truth = pair.ground_truth_csa;
    try {
      const CsaResult result = compute_csa(pair.organ, pair.tumor, config);
      row.computed = result.csa_area;
      row.insufficient_contact = result.insufficient_contact;
      row.percent_error = 100.0 * (row.computed - row.truth) / row.truth;
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  report.aggregate = aggregate_rows(report.rows);
  return report;
}

std::string report_csv(const BenchReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "id,truth,computed,percent_error\n";
  for (const BenchRow& row : report.rows) {
    os << row.id << ',' << row.truth << ',';
    if (row.failure) os << ",\n";
    else os << row.computed << ',' << row.percent_error << '\n';
  }
  return os.str();
}

std::string report_json(const BenchReport& report) {
  json rows = json::array();
  for (const BenchRow& row : report.rows) {
    json r = {{"id", row.id}, {"truth", row.truth}, {"insufficient_contact", row.insufficient_contact}};
    if (row.failure) {
      r["computed"] = nullptr;
      r["percent_error"] = nullptr;
      r["failure"] = *row.failure;
    } else {
      r["computed"] = row.computed;
      r["percent_error"] = row.percent_error;
    }
    rows.push_back(std::move(r));
  }
  const BenchAggregate& a = report.aggregate;
  const json aggregate = {{"completed", a.completed},     {"median", a.median},         {"q1", a.q1},
                          {"q3", a.q3},                   {"iqr", a.iqr},               {"whisker_low", a.whisker_low},
                          {"whisker_high", a.whisker_high}, {"outliers", a.outliers}, {"within_5_percent", a.within_5_percent}};
  return json{{"rows", rows}, {"aggregate", aggregate}}.dump(2) + "\n";
}

}  // namespace csa::synth
