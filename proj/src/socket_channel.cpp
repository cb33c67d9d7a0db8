#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "lmapf/bridge.hpp"
#include "lmapf/errors.hpp"

namespace lmapf {

SocketChannel::~SocketChannel() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> SocketChannel::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (eof_) return std::nullopt;
    char chunk[4096];
    const ssize_t got = ::recv(fd_, chunk, sizeof chunk, 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) {
      eof_ = true;
      continue;
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void SocketChannel::write_line(std::string_view line) {
  std::string data(line);
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw PolicyError(std::string("socket write failed: ") + std::strerror(errno));
    sent += static_cast<std::size_t>(n);
  }
}

std::vector<ServeReport> serve_tcp(const SimConfig& config, const GridMap& map, int port,
                                   const std::vector<std::uint64_t>& seeds, int connections, std::ostream& log,
                                   const std::function<void(int)>& on_listening) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw PolicyError("socket() failed");
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 16) != 0) {
    ::close(listener);
    throw PolicyError("cannot listen on port " + std::to_string(port) + ": " + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int bound = ntohs(addr.sin_port);
  if (on_listening) on_listening(bound);

  std::vector<ServeReport> reports(static_cast<std::size_t>(connections));
  std::vector<std::thread> workers;
  std::mutex log_mutex;
  for (int c = 0; c < connections; ++c) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
      reports[static_cast<std::size_t>(c)].ok = false;
      reports[static_cast<std::size_t>(c)].error = "accept failed";
      continue;
    }
    workers.emplace_back([&, fd, c] {
      SocketChannel channel(fd);
      std::vector<std::uint64_t> own = seeds;
      for (auto& s : own) s += static_cast<std::uint64_t>(c) * kConnectionSeedStride;
      std::ostringstream local_log;
      reports[static_cast<std::size_t>(c)] = serve(config, map, channel, own, local_log);
      std::lock_guard lock(log_mutex);
      log << local_log.str();
    });
  }
  for (auto& w : workers) w.join();
  ::close(listener);
  return reports;
}

int connect_tcp(int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw std::runtime_error("connect failed: " + std::string(std::strerror(errno)));
  }
  return fd;
}

}  // namespace lmapf
