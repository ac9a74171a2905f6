#pragma once

// WebSocket front end for sessions: one session per connection, JSON text
// messages in the envelope format of docs/protocol.md.

#include <cstdint>
#include <memory>
#include <string>

namespace smartlet::server {

struct Options {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;  ///< 0 picks a free port
  double snapshot_rate = 30.0;
  /// Outbound messages queued per connection before snapshots are dropped.
  std::size_t max_queue = 64;
};

class Server {
 public:
  explicit Server(Options options);
  ~Server();

  /// Bound port (after construction).
  std::uint16_t port() const;
  /// Serves until stop(); may be called from one thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses "HOST:PORT".
Options parse_bind(const std::string& bind, double snapshot_rate);

/// Runs a server until SIGINT/SIGTERM. Returns the process exit code.
int serve(const std::string& bind, double snapshot_rate);

}  // namespace smartlet::server
