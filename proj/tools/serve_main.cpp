#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "csa/service.hpp"

namespace {

csa::CsaService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

template <typename T>
void from_env(const char* name, T& value) {
  if (const char* v = std::getenv(name)) {
    try {
      value = static_cast<T>(std::stod(v));
    } catch (const std::exception&) {
      std::cerr << "ignoring " << name << "=" << v << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  csa::ServiceConfig config;
  double max_upload_mb = 256;
  long ttl_seconds = 3600;
  std::string static_dir;
  from_env("CSA_PORT", config.port);
  from_env("CSA_MAX_UPLOAD_MB", max_upload_mb);
  from_env("CSA_SESSION_TTL", ttl_seconds);
  if (const char* v = std::getenv("CSA_HOST")) config.host = v;
  if (const char* v = std::getenv("CSA_STATIC_DIR")) static_dir = v;

  CLI::App app{"HTTP service for contact surface area computation", "csa-serve"};
  app.add_option("--host", config.host, "Listen address");
  app.add_option("--port", config.port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  app.add_option("--max-upload-mb", max_upload_mb, "Per-file upload limit in MiB")->check(CLI::PositiveNumber);
  app.add_option("--session-ttl", ttl_seconds, "Idle seconds before a session is dropped")->check(CLI::PositiveNumber);
  app.add_option("--static-dir", static_dir, "Directory served at /");
  app.add_option("--cors-origin", config.cors_origin, "Access-Control-Allow-Origin value");
  CLI11_PARSE(app, argc, argv);

  config.max_upload_bytes = static_cast<std::size_t>(max_upload_mb * 1024 * 1024);
  config.session_ttl = std::chrono::seconds{ttl_seconds};
  if (!static_dir.empty()) config.static_dir = static_dir;

  csa::CsaService service(config);
  const int port = service.bind();
  if (port < 0) {
    std::cerr << "cannot listen on " << config.host << ":" << config.port << '\n';
    return 1;
  }
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;
  service.run();
  return 0;
}
