#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lfg/server/game_server.hpp"
#include "lfg/server/pipeline.hpp"

namespace lfg::server {

using Clock = std::function<Millis()>;

/// Wall-clock milliseconds since the epoch.
Millis system_clock_now();

struct HttpResponse {
  unsigned status = 200;
  nlohmann::json body;
};

/// The request/response endpoints, independent of the socket layer:
///   GET  /health
///   GET  /leaderboard?top=N                      (default 10)
///   GET  /factors/:id/description?threshold=X    (default 2)
///   GET  /admin/pipeline                         run status
///   POST /admin/pipeline                         JSON config overrides; 202 when started
/// `runner` and `pipeline_base` may be null when no pipeline is configured.
HttpResponse route_http(const GameServer& server, PipelineRunner* runner, const PipelineConfig* pipeline_base,
                        std::string_view method, std::string_view target, std::string_view body);

struct TransportOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  int tick_interval_ms = 200;
};

/// HTTP and WebSocket (path /ws) on one port. All GameServer calls happen on
/// the single I/O thread, which serializes game processing.
class Transport {
 public:
  Transport(GameServer& server, PipelineRunner* runner, std::optional<PipelineConfig> pipeline_base, Clock clock,
            TransportOptions options);
  ~Transport();
  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  /// The bound port; useful when options.port was 0.
  unsigned short port() const;

  /// Serves on the calling thread until stop().
  void run();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lfg::server
