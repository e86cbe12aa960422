#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>

namespace cop {

struct TcpAddress {
  std::string host;
  int port = 0;
};

/// Parses "tcp://host:port" or "host:port"; nullopt otherwise.
std::optional<TcpAddress> parse_tcp_address(const std::string& text);

/// Connects to `addr` and calls `on_line` for every newline-terminated line
/// until `stop` is set. Reconnects after `retry_s` when the peer goes away.
void read_tcp_lines(const TcpAddress& addr, const std::function<void(std::string)>& on_line,
                    const std::atomic<bool>& stop, double retry_s = 2.0);

}  // namespace cop
