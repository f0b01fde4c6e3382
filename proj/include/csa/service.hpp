#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace csa {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Per-upload limit; larger mesh files are answered with 413.
  std::size_t max_upload_bytes = std::size_t{256} << 20;
  std::chrono::seconds session_ttl{3600};
  double weld_epsilon_mm = 1e-5;
  /// Directory served at `/` (the built viewer), when it exists.
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
};

/// HTTP facade over the engine.
///
///   POST   /sessions                      multipart organ + tumor STL
///   GET    /sessions/{id}                 summaries and last result
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/compute         {cap_mm?, threshold_override_mm?, refine?}
///                                         ?include_distribution=1 adds the chart data
///   GET    /sessions/{id}/mesh/{organ|tumor}
///   GET    /health
class CsaService {
 public:
  using Clock = std::chrono::steady_clock;

  explicit CsaService(ServiceConfig config);
  ~CsaService();
  CsaService(const CsaService&) = delete;
  CsaService& operator=(const CsaService&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound
  /// port or -1 on failure.
  int bind();
  /// Serves until stop() is called. Also runs periodic session eviction.
  void run();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

  std::size_t session_count() const;
  /// Drops sessions idle for longer than the TTL as of `now`.
  std::size_t evict_expired(Clock::time_point now);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace csa
