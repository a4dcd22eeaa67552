#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "affectgate/session/manager.hpp"

namespace affectgate::session {

struct ServerOptions {
  std::string address = "127.0.0.1";
  // 0 picks an ephemeral port; see Server::port().
  std::uint16_t port = 8080;
  unsigned io_threads = 1;
  unsigned worker_threads = 2;
  std::function<void(std::string_view)> log;
};

// HTTP/1.1 server for ApiRouter plus the WebSocket feed at
// /sessions/{id}/feed, which pushes every new log record and fit update of
// the session as a JSON text message. Request handling runs on a worker
// pool, off the I/O threads.
class Server {
 public:
  Server(SessionManager& manager, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts serving in the background. Throws std::system_error if
  // the address cannot be bound.
  void start();
  std::uint16_t port() const;
  // Stops accepting, drops open connections and joins all threads.
  void stop();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace affectgate::session
