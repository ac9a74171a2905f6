#pragma once

// One live world per session. Commands arrive from the connection's I/O
// context through a queue and are applied on the session's own runner
// thread, always between ticks. Output leaves through the sink.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "smartlet/protocol.hpp"
#include "smartlet/world.hpp"

namespace smartlet::session {

using proto::json;

class Session {
 public:
  /// `droppable` marks snapshots, which the transport may discard under
  /// backpressure. Called from the runner thread; it must not destroy the
  /// session.
  using Sink = std::function<void(const std::string& kind, json payload, bool droppable)>;

  Session(std::string id, Sink sink, double snapshot_rate = 30.0);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }

  /// Queues a client command; the reply (ack or error) carries `seq`.
  void submit(std::int64_t seq, std::string kind, json payload);

  /// Stops the runner and waits for it. Not callable from the sink.
  void stop();

  /// Blocks until every queued command has been handled (tests).
  void drain();

  /// Copies of runner state, safe from any thread.
  proto::Recording recording() const;
  std::string log_text() const;
  std::int64_t steps() const;

  static constexpr double kMaxSpeed = 1000.0;
  static constexpr int kMaxBatch = 250;

 private:
  struct Pending {
    std::int64_t seq;
    std::string kind;
    json payload;
  };

  void run();
  void handle(const Pending& p);
  void advance(std::int64_t n);
  void snapshot();
  void anchor_pacing();

  std::string id_;
  Sink sink_;
  std::int64_t snapshot_interval_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  std::size_t handled_ = 0, submitted_ = 0;
  std::condition_variable drained_;
  bool stop_ = false;

  // Runner-owned; recording and log copies are guarded by mu_.
  std::optional<world::World> world_;
  std::string scenario_yaml_;
  std::string scenario_name_;
  bool running_ = false;
  double speed_ = 1.0;
  std::chrono::steady_clock::time_point pace_wall0_;
  std::int64_t pace_step0_ = 0;
  std::int64_t steps_ = 0;
  proto::Recording recording_;
  log::EventLog log_;

  std::thread runner_;
};

}  // namespace smartlet::session
