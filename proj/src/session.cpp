#include "smartlet/session.hpp"

#include <chrono>
#include <cmath>

#include "smartlet/errors.hpp"

namespace smartlet::session {

Session::Session(std::string id, Sink sink, double snapshot_rate)
    : id_(std::move(id)),
      sink_(std::move(sink)),
      snapshot_interval_(std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::llround(1000.0 / std::max(snapshot_rate, 1e-3))))) {
  runner_ = std::thread([this] { run(); });
}

Session::~Session() { stop(); }

void Session::stop() {
  {
    std::lock_guard lk(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (runner_.joinable()) runner_.join();
}

void Session::submit(std::int64_t seq, std::string kind, json payload) {
  {
    std::lock_guard lk(mu_);
    queue_.push_back({seq, std::move(kind), std::move(payload)});
    ++submitted_;
  }
  cv_.notify_all();
}

void Session::drain() {
  std::unique_lock lk(mu_);
  drained_.wait(lk, [&] { return handled_ == submitted_ || stop_; });
}

proto::Recording Session::recording() const {
  std::lock_guard lk(mu_);
  return recording_;
}

std::string Session::log_text() const {
  std::lock_guard lk(mu_);
  return log_.render(steps_, 0.0);
}

std::int64_t Session::steps() const {
  std::lock_guard lk(mu_);
  return steps_;
}

void Session::anchor_pacing() {
  pace_wall0_ = std::chrono::steady_clock::now();
  pace_step0_ = steps_;
}

void Session::run() {
  while (true) {
    std::deque<Pending> batch;
    {
      std::unique_lock lk(mu_);
      auto ready = [&] { return stop_ || !queue_.empty(); };
      if (running_ && world_) {
        cv_.wait_for(lk, std::chrono::milliseconds(2), ready);
      } else {
        cv_.wait(lk, ready);
      }
      if (stop_) break;
      batch.swap(queue_);
    }
    for (const auto& p : batch) {
      handle(p);
      {
        std::lock_guard lk(mu_);
        ++handled_;
      }
      drained_.notify_all();
    }
    if (running_ && world_) {
      const double elapsed_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - pace_wall0_)
                                    .count();
      const auto target = pace_step0_ + static_cast<std::int64_t>(elapsed_ms * speed_);
      const auto n = std::min<std::int64_t>(target - steps_, kMaxBatch);
      if (n > 0) advance(n);
    }
  }
  drained_.notify_all();
}

void Session::advance(std::int64_t n) {
  for (std::int64_t k = 0; k < n; ++k) {
    auto events = world_->step();
    {
      std::lock_guard lk(mu_);
      ++steps_;
      recording_.steps = steps_;
      log_.append(events);
    }
    for (const auto& e : events) sink_("event", proto::to_json(e), false);
    if (world_->tick() % snapshot_interval_ == 0) snapshot();
  }
}

void Session::snapshot() {
  if (world_) sink_("snapshot", proto::to_json(world_->snapshot()), true);
}

void Session::handle(const Pending& p) {
  auto reply_error = [&](const std::string& code, const std::string& message) {
    sink_("error", json{{"ack_seq", p.seq}, {"code", code}, {"message", message}}, false);
  };
  try {
    if (p.kind == "load_scenario") {
      const auto& yaml = p.payload.at("yaml");
      if (!yaml.is_string()) throw InvalidParameter("yaml must be a string");
      auto sc = world::parse_scenario(yaml.get<std::string>());
      if (p.payload.contains("seed")) sc.seed = p.payload.at("seed").get<std::uint64_t>();
      world_.emplace(sc);
      running_ = false;
      {
        std::lock_guard lk(mu_);
        steps_ = 0;
        scenario_yaml_ = world::to_yaml(sc);
        scenario_name_ = sc.name;
        recording_ = proto::Recording{scenario_yaml_, {}, 0};
        log_ = log::EventLog(sc.name);
      }
      sink_("ack", json{{"ack_seq", p.seq}, {"name", sc.name}, {"robots", sc.robots.size()}}, false);
      snapshot();
      return;
    }
    if (!world_) {
      if (p.kind == "export_recording") {
        sink_("ack", json{{"ack_seq", p.seq}, {"recording", proto::to_json(recording())}}, false);
        return;
      }
      reply_error("no_scenario", "load_scenario first");
      return;
    }
    if (p.kind == "start") {
      running_ = true;
      anchor_pacing();
      sink_("ack", json{{"ack_seq", p.seq}, {"tick", world_->tick()}}, false);
    } else if (p.kind == "pause") {
      running_ = false;
      sink_("ack", json{{"ack_seq", p.seq}, {"tick", world_->tick()}}, false);
      snapshot();
    } else if (p.kind == "step") {
      const auto n = p.payload.value("n", std::int64_t{1});
      if (n < 0 || n > 10'000'000) throw InvalidParameter("step n out of range");
      advance(n);
      if (running_) anchor_pacing();
      sink_("ack", json{{"ack_seq", p.seq}, {"tick", world_->tick()}}, false);
      snapshot();
    } else if (p.kind == "set_speed") {
      const double f = p.payload.at("factor").get<double>();
      if (!(f > 0) || f > kMaxSpeed) throw InvalidParameter("speed factor must be in (0, 1000]");
      speed_ = f;
      anchor_pacing();
      sink_("ack", json{{"ack_seq", p.seq}, {"speed", speed_}}, false);
    } else if (proto::is_world_command(p.kind)) {
      world_->apply(proto::command_from_json(p.kind, p.payload, world_->scenario()));
      {
        std::lock_guard lk(mu_);
        recording_.commands.push_back({steps_, p.kind, p.payload});
      }
      sink_("ack", json{{"ack_seq", p.seq}, {"tick", world_->tick()}}, false);
      snapshot();
    } else if (p.kind == "export_recording") {
      json payload{{"ack_seq", p.seq}, {"recording", proto::to_json(recording())}};
      if (p.payload.value("include_log", false)) payload["log"] = log_text();
      sink_("ack", payload, false);
    } else {
      reply_error("unknown_kind", "unknown message kind '" + p.kind + "'");
    }
  } catch (const ParseError& e) {
    reply_error("invalid_command", std::string(e.what()) + " (line " + std::to_string(e.line()) +
                                       ", column " + std::to_string(e.column()) + ")");
  } catch (const json::exception& e) {
    reply_error("malformed", e.what());
  } catch (const Error& e) {
    reply_error("invalid_command", e.what());
  }
}

}  // namespace smartlet::session
