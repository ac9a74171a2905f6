#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "smartlet/lablet_vm.hpp"
#include "smartlet/protocol.hpp"
#include "smartlet/session.hpp"

using namespace smartlet;
using session::Session;
using proto::json;

namespace {

struct Collector {
  std::mutex mu;
  std::vector<std::tuple<std::string, json, bool>> msgs;

  Session::Sink sink() {
    return [this](const std::string& k, json p, bool d) {
      std::lock_guard lk(mu);
      msgs.emplace_back(k, std::move(p), d);
    };
  }
  std::vector<json> of(const std::string& kind) {
    std::lock_guard lk(mu);
    std::vector<json> out;
    for (auto& [k, p, d] : msgs) {
      if (k == kind) out.push_back(p);
    }
    return out;
  }
  std::map<std::int64_t, int> replies() {
    std::lock_guard lk(mu);
    std::map<std::int64_t, int> n;
    for (auto& [k, p, d] : msgs) {
      if ((k == "ack" || k == "error") && p.contains("ack_seq")) ++n[p["ack_seq"].get<std::int64_t>()];
    }
    return n;
  }
};

std::string scenario_text(const std::string& name) {
  std::ifstream in(std::filesystem::path(SMARTLET_SOURCE_DIR) / "scenarios" / (name + ".yaml"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kNav = R"(scenario_version: 1
name: laser_follow
seed: 1
robots:
  - id: 1
    position: [20, 20]
    autostart: true
    program:
      phase1: {act_mask: 1, period_code: 0, duty_code: 7, timeout_code: 0}
      phase2: {act_mask: 2, period_code: 0, duty_code: 7, timeout_code: 0}
      phase3: {act_mask: 4, period_code: 0, duty_code: 7, timeout_code: 0}
      sensor_condition: rising_edge
      transition_mode: advance_on_sensor
      debounce_ticks: 2
)";

}  // namespace

TEST(Session, LoadStepAndAck) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", kNav}});
  s.submit(2, "step", {{"n", 120}});
  s.drain();
  const auto acks = c.of("ack");
  ASSERT_EQ(acks.size(), 2u);
  EXPECT_EQ(acks[1]["tick"], 120);
  EXPECT_EQ(s.steps(), 120);
  const auto snaps = c.of("snapshot");
  ASSERT_FALSE(snaps.empty());
  EXPECT_EQ(snaps.back()["tick"], 120);
  EXPECT_EQ(snaps.back()["robots"][0]["phase"], 1);
  EXPECT_FALSE(c.of("event").empty());
}

TEST(Session, StartPauseFreezesTime) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", kNav}});
  s.submit(2, "set_speed", {{"factor", 50}});
  s.submit(3, "start", json::object());
  s.drain();
  std::this_thread::sleep_for(std::chrono::milliseconds(150));
  s.submit(4, "pause", json::object());
  s.drain();
  const auto frozen = s.steps();
  EXPECT_GT(frozen, 100);
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  EXPECT_EQ(s.steps(), frozen);
  EXPECT_EQ(c.of("ack").back()["tick"], frozen);
}

TEST(Session, LaserMoveTriggersTransitionWithinBudget) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", kNav}});
  s.submit(2, "step", {{"n", 500}});
  s.drain();
  const auto snap = c.of("snapshot").back();
  const double x = snap["robots"][0]["position"][0], y = snap["robots"][0]["position"][1];
  s.submit(3, "move_laser", {{"x", x}, {"y", y}, {"on", true}});
  s.submit(4, "step", {{"n", 100}});
  s.drain();
  std::int64_t fired = -1;
  for (const auto& e : c.of("event")) {
    if (e["kind"] == "phase_transition" && fired < 0) fired = e["tick"];
  }
  ASSERT_GE(fired, 500);
  EXPECT_LT(fired - 500, 50);
}

TEST(Session, EmittedFramesMatchScriptedUpload) {
  auto sc = world::parse_scenario(scenario_text("optical_upload"));
  const auto load = sc.led_script.at(0);
  const auto run = sc.led_script.at(1);
  const auto expected = world::run_scenario(sc).render(sc.ticks, 0);

  sc.led_script.clear();
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", world::to_yaml(sc)}});
  s.submit(2, "step", {{"n", static_cast<int>(load.at_ms)}});
  s.submit(3, "emit_frame", {{"command", "LOAD"}, {"program_bits", vm::to_bit_string(load.frame.payload)}});
  s.submit(4, "step", {{"n", static_cast<int>(run.at_ms - load.at_ms)}});
  s.submit(5, "emit_frame", {{"frame_hex", optical::to_hex(run.frame)}});
  s.submit(6, "step", {{"n", static_cast<int>(sc.ticks - run.at_ms)}});
  s.drain();
  const auto r = log::verify(s.log_text(), expected);
  EXPECT_TRUE(r.pass) << "line " << r.line << "\n" << r.log_line << "\n" << r.golden_line;
}

TEST(Session, RecordingReplaysToIdenticalLog) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", kNav}});
  std::int64_t seq = 2;
  // A laser drag in front of the robot, one step per move.
  for (int i = 0; i < 40; ++i) {
    s.submit(seq++, "move_laser", {{"x", 20.0 - i * 0.05}, {"y", 20.0}, {"on", true}});
    s.submit(seq++, "step", {{"n", 25}});
  }
  s.submit(seq++, "toggle_zone", {{"id", "missing"}});  // rejected, not recorded
  s.submit(seq++, "reset", {{"seed", 8}});
  s.submit(seq++, "step", {{"n", 300}});
  s.submit(seq++, "export_recording", {{"include_log", true}});
  s.drain();
  const auto rec_json = c.of("ack").back()["recording"];
  const auto rec = proto::recording_from_json(rec_json);
  EXPECT_EQ(rec.commands.size(), 41u);
  EXPECT_EQ(rec.steps, 40 * 25 + 300);
  const auto live = c.of("ack").back()["log"].get<std::string>();
  const auto r = log::verify(proto::replay(rec), live);
  EXPECT_TRUE(r.pass) << "line " << r.line << "\n" << r.log_line << "\n" << r.golden_line;
  // Round trip through JSON text as well.
  const auto again = proto::recording_from_json(json::parse(rec_json.dump()));
  EXPECT_TRUE(log::verify(proto::replay(again), live).pass);
}

TEST(Session, EmptySessionRecordsNothing) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "load_scenario", {{"yaml", kNav}});
  s.submit(2, "export_recording", json::object());
  s.drain();
  const auto rec = proto::recording_from_json(c.of("ack").back()["recording"]);
  EXPECT_TRUE(rec.commands.empty());
  EXPECT_EQ(rec.steps, 0);
}

TEST(Session, ErrorsKeepSessionAndAnswerOnce) {
  Collector c;
  Session s("t", c.sink());
  s.submit(1, "step", {{"n", 5}});                       // no scenario yet
  s.submit(2, "load_scenario", {{"yaml", "nope: ["}});    // YAML error
  s.submit(3, "load_scenario", {{"yaml", kNav}});
  s.submit(4, "toggle_zone", {{"id", "absent"}});
  s.submit(5, "move_laser", {{"x", "left"}});
  s.submit(6, "warp", json::object());
  s.submit(7, "set_speed", {{"factor", -1}});
  s.submit(8, "emit_frame", {{"command", "JUMP"}});
  s.submit(9, "place_robot", {{"robot", {{"id", 5}, {"position", {500, 5}}}}});
  s.submit(10, "place_robot", {{"robot", {{"id", 5}, {"position", {5, 5}}}}});
  s.submit(11, "step", {{"n", 10}});
  s.drain();
  const auto replies = c.replies();
  for (std::int64_t q = 1; q <= 11; ++q) EXPECT_EQ(replies.count(q) ? replies.at(q) : 0, 1) << q;
  std::map<std::int64_t, std::string> codes;
  for (const auto& e : c.of("error")) codes[e["ack_seq"]] = e["code"];
  EXPECT_EQ(codes[1], "no_scenario");
  EXPECT_EQ(codes[2], "invalid_command");
  EXPECT_EQ(codes[4], "invalid_command");
  EXPECT_EQ(codes[5], "invalid_command");
  EXPECT_EQ(codes[6], "unknown_kind");
  EXPECT_EQ(codes[7], "invalid_command");
  EXPECT_EQ(codes[8], "invalid_command");
  EXPECT_EQ(codes[9], "invalid_command");
  EXPECT_FALSE(codes.count(10));
  EXPECT_EQ(c.of("snapshot").back()["robots"].size(), 2u);
  EXPECT_EQ(s.steps(), 10);
}
