#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cop/engine.hpp"
#include "cop/error.hpp"

namespace cop {

/// HTTP front end over one engine. Responses are JSON mirroring the domain
/// types; errors are {"error": {"code", "message"}}.
class CopService {
 public:
  struct Options {
    /// Parent directory for replay sessions started with POST /replay.
    std::filesystem::path replay_root = "replays";
    /// Interval between keep-alive comments on idle streams.
    double stream_keepalive_s = 15.0;
  };

  explicit CopService(CopEngine& engine);
  CopService(CopEngine& engine, Options options);
  ~CopService();
  CopService(const CopService&) = delete;
  CopService& operator=(const CopService&) = delete;

  /// Binds and serves until stop(); returns false if binding fails.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (-1 on failure); serve with
  /// listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  /// Ends open streams, waits for replay sessions and stops the listener.
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code.
int http_status(Errc code);

}  // namespace cop
