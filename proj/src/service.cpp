#include "csa/service.hpp"

#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>

#include <json.hpp>

#include "csa/engine.hpp"
#include "csa/report.hpp"

namespace csa {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

struct Session {
  TriMesh organ;
  TriMesh tumor;
  double unit_scale = 1.0;
  json organ_summary;
  json tumor_summary;

  std::mutex mutex;  // serializes compute and guards everything below
  std::optional<double> cached_cap;
  DistanceVector cached_distances;
  json last_result;
  std::string organ_payload;
  std::string tumor_payload;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message, const json& extra = json::object()) {
  json body = extra;
  body["error"] = message;
  send_json(res, status, body);
}

/// Validated compute parameters; the error string is non-empty on failure.
struct ComputeRequest {
  CsaConfig config;
  std::string error;
};

ComputeRequest parse_compute_request(const std::string& text) {
  ComputeRequest out;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return out;
  const json body = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded()) {
    out.error = "request body is not valid JSON";
    return out;
  }
  if (!body.is_object()) {
    out.error = "request body must be a JSON object";
    return out;
  }
  for (const auto& [key, value] : body.items()) {
    if (key == "cap_mm") {
      if (!value.is_number() || !std::isfinite(value.get<double>()) || value.get<double>() <= 0.0) {
        out.error = "cap_mm must be a positive number";
        return out;
      }
      out.config.cap_mm = value.get<double>();
    } else if (key == "threshold_override_mm") {
      if (value.is_null()) continue;
      if (!value.is_number() || !std::isfinite(value.get<double>()) || value.get<double>() < 0.0) {
        out.error = "threshold_override_mm must be a non-negative number or null";
        return out;
      }
      out.config.threshold_override_mm = value.get<double>();
    } else if (key == "refine") {
      if (!value.is_boolean()) {
        out.error = "refine must be a boolean";
        return out;
      }
      out.config.refine = value.get<bool>();
    } else {
      out.error = "unknown parameter '" + key + "'";
      return out;
    }
  }
  return out;
}

bool flag_set(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return false;
  const std::string v = req.get_param_value(name);
  return v == "1" || v == "true" || v == "yes";
}

}  // namespace

struct CsaService::Impl {
  explicit Impl(ServiceConfig c) : config(std::move(c)) {}

  ServiceConfig config;
  httplib::Server server;
  int bound_port = -1;

  mutable std::mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::map<std::string, Clock::time_point> last_used;
  std::mt19937_64 id_source{std::random_device{}()};

  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopping = false;

  std::string new_session_id() {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(id_source()),
                  static_cast<unsigned long long>(id_source()));
    return buf;
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(registry_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) return nullptr;
    last_used[id] = Clock::now();
    return it->second;
  }

  std::size_t evict(Clock::time_point now) {
    std::lock_guard lock(registry_mutex);
    std::size_t dropped = 0;
    for (auto it = last_used.begin(); it != last_used.end();) {
      if (now - it->second > config.session_ttl) {
        sessions.erase(it->first);
        it = last_used.erase(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

  void install_routes();
  void create_session(const httplib::Request& req, httplib::Response& res);
  void compute(const httplib::Request& req, httplib::Response& res);
};

void CsaService::Impl::install_routes() {
  // Room for both files plus multipart framing; individual files are checked
  // against the limit in the handler.
  server.set_payload_max_length(2 * config.max_upload_bytes + (std::size_t{1} << 20));

  server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});

  if (config.static_dir && std::filesystem::is_directory(*config.static_dir))
    server.set_mount_point("/", config.static_dir->string());

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, res.status, httplib::status_message(res.status));
    return httplib::Server::HandlerResponse::Handled;
  });

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, message);
  });

  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create_session(req, res); });

  server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    std::lock_guard lock(session->mutex);
    send_json(res, 200,
              {{"session_id", req.matches[1]},
               {"unit_scale", session->unit_scale},
               {"organ", session->organ_summary},
               {"tumor", session->tumor_summary},
               {"last_result", session->last_result}});
  });

  server.Delete(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(registry_mutex);
    if (sessions.erase(req.matches[1]) == 0) return send_error(res, 404, "unknown session");
    last_used.erase(req.matches[1]);
    res.status = 204;
  });

  server.Post(R"(/sessions/([0-9a-f]+)/compute)",
              [this](const httplib::Request& req, httplib::Response& res) { compute(req, res); });

  server.Get(R"(/sessions/([0-9a-f]+)/mesh/(organ|tumor))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return send_error(res, 404, "unknown session");
    const bool organ = req.matches[2] == "organ";
    std::string payload;
    {
      std::lock_guard lock(session->mutex);
      std::string& cached = organ ? session->organ_payload : session->tumor_payload;
      if (cached.empty()) cached = mesh_to_json(organ ? session->organ : session->tumor).dump();
      payload = cached;
    }
    res.status = 200;
    res.set_content(std::move(payload), kJson);
  });
}

void CsaService::Impl::create_session(const httplib::Request& req, httplib::Response& res) {
  if (!req.is_multipart_form_data()) return send_error(res, 400, "expected multipart/form-data with organ and tumor files");

  double unit_scale = 1.0;
  if (req.has_file("unit_scale")) {
    const std::string text = req.get_file_value("unit_scale").content;
    try {
      std::size_t used = 0;
      unit_scale = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      return send_error(res, 400, "unit_scale is not a number");
    }
    if (!std::isfinite(unit_scale) || unit_scale <= 0.0) return send_error(res, 400, "unit_scale must be positive");
  }

  TriMesh meshes[2];
  const char* names[2] = {"organ", "tumor"};
  for (int k = 0; k < 2; ++k) {
    const std::string name = names[k];
    if (!req.has_file(name)) return send_error(res, 400, "missing upload '" + name + "'", {{"upload", name}});
    const auto& file = req.get_file_value(name);
    if (file.content.size() > config.max_upload_bytes)
      return send_error(res, 413, name + " upload exceeds " + std::to_string(config.max_upload_bytes) + " bytes",
                        {{"upload", name}});
    try {
      meshes[k] = prepare_mesh(file.content, unit_scale, config.weld_epsilon_mm);
      if (meshes[k].empty()) throw MeshError(MeshError::Kind::EmptyMesh, "no faces left after welding");
    } catch (const MeshError& e) {
      return send_error(res, 400, name + " upload is not a valid STL: " + e.what(), {{"upload", name}});
    }
  }

  auto session = std::make_shared<Session>();
  session->organ = std::move(meshes[0]);
  session->tumor = std::move(meshes[1]);
  session->unit_scale = unit_scale;
  session->organ_summary = mesh_summary(session->organ);
  session->tumor_summary = mesh_summary(session->tumor);
  session->last_result = nullptr;

  std::string id;
  {
    std::lock_guard lock(registry_mutex);
    do id = new_session_id();
    while (sessions.count(id) != 0);
    sessions[id] = session;
    last_used[id] = Clock::now();
  }
  send_json(res, 201,
            {{"session_id", id},
             {"unit_scale", unit_scale},
             {"organ", session->organ_summary},
             {"tumor", session->tumor_summary}});
}

void CsaService::Impl::compute(const httplib::Request& req, httplib::Response& res) {
  const auto session = find(req.matches[1]);
  if (!session) return send_error(res, 404, "unknown session");
  const ComputeRequest request = parse_compute_request(req.body);
  if (!request.error.empty()) return send_error(res, 422, request.error);
  const CsaConfig& config = request.config;

  std::lock_guard lock(session->mutex);
  // Distances depend on the meshes and the cap only; a threshold override
  // or refinement toggle reuses them.
  if (!session->cached_cap || *session->cached_cap != config.cap_mm) {
    session->cached_distances = tumor_organ_distances(session->organ, session->tumor, config.cap_mm);
    session->cached_cap = config.cap_mm;
  }
  const DistanceVector& d = session->cached_distances;
  const TriMesh& measured = d.small_is_first ? session->tumor : session->organ;
  const TriMesh& other = d.small_is_first ? session->organ : session->tumor;
  const CsaResult result = evaluate_csa(measured, d.small_is_first, other.face_count(), d.distances, config);

  json body = result_to_json(result, {session->unit_scale, config.cap_mm});
  session->last_result = body;
  if (flag_set(req, "include_distribution")) body["distribution"] = distribution_to_json(d.distances, result, config.cap_mm);
  send_json(res, 200, body);
}

CsaService::CsaService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) { impl_->install_routes(); }

CsaService::~CsaService() { stop(); }

int CsaService::bind() {
  Impl& s = *impl_;
  s.bound_port = s.config.port == 0 ? s.server.bind_to_any_port(s.config.host)
                                    : (s.server.bind_to_port(s.config.host, s.config.port) ? s.config.port : -1);
  return s.bound_port;
}

void CsaService::run() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopping = false;
  }
  std::thread evictor([&s] {
    const auto period = std::clamp<std::chrono::seconds>(s.config.session_ttl / 4, std::chrono::seconds{1},
                                                         std::chrono::seconds{60});
    std::unique_lock lock(s.stop_mutex);
    while (!s.stop_cv.wait_for(lock, period, [&s] { return s.stopping; })) {
      lock.unlock();
      s.evict(Clock::now());
      lock.lock();
    }
  });
  s.server.listen_after_bind();
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopping = true;
  }
  s.stop_cv.notify_all();
  evictor.join();
}

void CsaService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  {
    std::lock_guard lock(impl_->stop_mutex);
    impl_->stopping = true;
  }
  impl_->stop_cv.notify_all();
}

void CsaService::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::size_t CsaService::session_count() const {
  std::lock_guard lock(impl_->registry_mutex);
  return impl_->sessions.size();
}

std::size_t CsaService::evict_expired(Clock::time_point now) { return impl_->evict(now); }

}  // namespace csa
