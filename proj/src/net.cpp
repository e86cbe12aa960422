#include "cop/net.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cstring>
#include <thread>

namespace cop {

std::optional<TcpAddress> parse_tcp_address(const std::string& text) {
  std::string_view s = text;
  if (s.substr(0, 6) == "tcp://") s.remove_prefix(6);
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  TcpAddress addr;
  addr.host = std::string(s.substr(0, colon));
  const auto port = s.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), addr.port);
  if (ec != std::errc() || ptr != port.data() + port.size() || addr.port <= 0 || addr.port > 65535)
    return std::nullopt;
  return addr;
}

namespace {

int connect_to(const TcpAddress& addr) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(addr.host.c_str(), std::to_string(addr.port).c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (auto* p = res; p; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  return fd;
}

}  // namespace

void read_tcp_lines(const TcpAddress& addr, const std::function<void(std::string)>& on_line,
                    const std::atomic<bool>& stop, double retry_s) {
  const auto retry = std::chrono::milliseconds(static_cast<long>(retry_s * 1000));
  while (!stop) {
    const int fd = connect_to(addr);
    if (fd < 0) {
      std::this_thread::sleep_for(retry);
      continue;
    }
    std::string pending;
    char buf[4096];
    while (!stop) {
      pollfd p{fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, 200);
      if (ready < 0) break;
      if (ready == 0) continue;
      const auto n = ::recv(fd, buf, sizeof buf, 0);
      if (n <= 0) break;
      pending.append(buf, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (auto nl = pending.find('\n', start); nl != std::string::npos; nl = pending.find('\n', start)) {
        std::string line = pending.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) on_line(std::move(line));
        start = nl + 1;
      }
      pending.erase(0, start);
    }
    ::close(fd);
    if (!stop) std::this_thread::sleep_for(retry);
  }
}

}  // namespace cop
