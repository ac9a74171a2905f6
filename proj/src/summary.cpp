#include "smartlet/summary.hpp"

#include <cmath>
#include <json.hpp>
#include <map>

namespace smartlet::summary {

namespace {

struct Pose {
  std::int64_t tick;
  double x, y;
};

double path_between(const std::vector<Pose>& poses, std::int64_t a, std::int64_t b) {
  double len = 0.0;
  const Pose* prev = nullptr;
  for (const auto& p : poses) {
    if (p.tick < a || p.tick > b) continue;
    if (prev) len += std::hypot(p.x - prev->x, p.y - prev->y);
    prev = &p;
  }
  return len;
}

std::optional<Pose> pose_at_or_before(const std::vector<Pose>& poses, std::int64_t t) {
  std::optional<Pose> best;
  for (const auto& p : poses) {
    if (p.tick <= t) best = p;
  }
  return best;
}

std::optional<Pose> pose_at_or_after(const std::vector<Pose>& poses, std::int64_t t) {
  for (const auto& p : poses) {
    if (p.tick >= t) return p;
  }
  return std::nullopt;
}

}  // namespace

std::string axis_label(double deg) {
  const double d = std::remainder(deg, 360.0);
  if (std::abs(d) <= 45.0) return "+x";
  if (d > 45.0 && d <= 135.0) return "+y";
  if (d < -45.0 && d >= -135.0) return "-y";
  return "-x";
}

RunSummary summarize(const std::vector<log::Event>& events, std::int64_t ticks,
                     const std::string& scenario, double wall_ms) {
  RunSummary out;
  out.scenario = scenario;
  out.ticks = ticks;
  out.wall_ms = wall_ms;

  struct Track {
    std::vector<Pose> poses;
    std::optional<std::int64_t> active_since;
    std::vector<std::pair<std::int64_t, int>> starts;  // (tick, phase)
    std::vector<std::int64_t> lifts;
    std::vector<std::pair<std::int64_t, double>> cycles;
    RobotSummary summary;
  };
  std::map<int, Track> tracks;

  for (const auto& e : events) {
    if (e.robot < 0) continue;
    auto& t = tracks[e.robot];
    t.summary.id = e.robot;
    switch (e.kind) {
      case log::Kind::pose:
        t.poses.push_back({e.tick, e.number("x"), e.number("y")});
        break;
      case log::Kind::act:
        if (!t.active_since && e.get("bits") != "000") {
          t.active_since = e.tick;
          t.starts.push_back({e.tick, 1});
        }
        break;
      case log::Kind::phase_transition: {
        const int to = std::stoi(e.get("to"));
        if (!t.active_since) {
          // Program started without actuating: its first phase still counts.
          t.active_since = e.tick;
        }
        t.starts.push_back({e.tick, to});
        break;
      }
      case log::Kind::bubble:
        if (e.get("event") == "lift") t.lifts.push_back(e.tick);
        if (e.get("event") == "reseat") t.cycles.push_back({e.tick, e.number("cycle_ms")});
        break;
      case log::Kind::dock:
      case log::Kind::undock: {
        const bool formed = e.kind == log::Kind::dock;
        const int other = std::stoi(e.get("other"));
        DockRecord d{e.tick, other, formed ? e.number("offset") : 0.0, formed};
        t.summary.docks.push_back(d);
        auto& o = tracks[other];
        o.summary.id = other;
        o.summary.docks.push_back({e.tick, e.robot, d.offset_mm, formed});
        break;
      }
      case log::Kind::frame_rx:
        if (!e.get("frame").empty()) ++t.summary.frames_received;
        break;
      default:
        break;
    }
  }

  for (auto& [id, t] : tracks) {
    auto& rs = t.summary;
    double total_path = 0.0;
    double total_s = 0.0;
    for (std::size_t k = 0; k < t.starts.size(); ++k) {
      const auto [start, phase] = t.starts[k];
      if (phase < 1 || phase > 3) continue;  // halted
      const std::int64_t end = k + 1 < t.starts.size() ? t.starts[k + 1].first : ticks;
      if (end <= start) continue;
      PhaseStat ps;
      ps.phase = phase;
      ps.start_tick = start;
      ps.end_tick = end;
      ps.path_mm = path_between(t.poses, start, end);
      ps.mean_speed_mm_s = ps.path_mm / ((end - start) * 1e-3);
      const auto a = pose_at_or_after(t.poses, start + kDirectionSettleTicks);
      const auto b = pose_at_or_before(t.poses, end);
      if (a && b && b->tick > a->tick) {
        const double dx = b->x - a->x, dy = b->y - a->y;
        ps.steady_speed_mm_s = std::hypot(dx, dy) / ((b->tick - a->tick) * 1e-3);
        if (std::hypot(dx, dy) > 0.05) {
          ps.direction_deg = std::atan2(dy, dx) * 180.0 / M_PI;
          ps.axis = axis_label(*ps.direction_deg);
        }
      }
      double cyc = 0.0;
      int ncyc = 0;
      for (auto l : t.lifts) ps.lifts += (l >= start && l < end);
      for (auto [tick, ms] : t.cycles) {
        // The first cycle of a phase includes the initial fill.
        if (tick >= start && tick < end) {
          if (ncyc++ > 0) cyc += ms;
        }
      }
      if (ncyc > 1) ps.tilt_hz = 1000.0 / (cyc / (ncyc - 1));
      total_path += ps.path_mm;
      total_s += (end - start) * 1e-3;
      rs.phases.push_back(ps);
    }
    if (total_s > 0) rs.mean_speed_mm_s = total_path / total_s;
    for (std::size_t k = 1; k < rs.phases.size(); ++k) {
      const auto& p0 = rs.phases[k - 1];
      const auto& p1 = rs.phases[k];
      if (!p0.direction_deg || !p1.direction_deg) continue;
      Turn turn;
      turn.tick = p1.start_tick;
      turn.from_axis = p0.axis;
      turn.to_axis = p1.axis;
      turn.angle_deg = std::remainder(*p1.direction_deg - *p0.direction_deg, 360.0);
      rs.turns.push_back(turn);
    }
    if (!rs.phases.empty()) {
      // rho v L / eta with L = 1 mm in water.
      rs.reynolds = 1000.0 * rs.phases.front().steady_speed_mm_s * 1e-3 * 1e-3 / 1e-3;
    }
    out.robots.push_back(rs);
  }
  return out;
}

std::string to_json(const RunSummary& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["scenario"] = s.scenario;
  j["ticks"] = s.ticks;
  j["wall_ms"] = s.wall_ms;
  j["robots"] = ordered_json::array();
  for (const auto& r : s.robots) {
    ordered_json jr;
    jr["id"] = r.id;
    jr["mean_speed_mm_s"] = r.mean_speed_mm_s;
    jr["reynolds"] = r.reynolds;
    jr["frames_received"] = r.frames_received;
    jr["phases"] = ordered_json::array();
    for (const auto& p : r.phases) {
      ordered_json jp;
      jp["phase"] = p.phase;
      jp["start_tick"] = p.start_tick;
      jp["end_tick"] = p.end_tick;
      jp["path_mm"] = p.path_mm;
      jp["mean_speed_mm_s"] = p.mean_speed_mm_s;
      jp["direction_deg"] = p.direction_deg ? ordered_json(*p.direction_deg) : ordered_json();
      jp["axis"] = p.axis;
      jp["steady_speed_mm_s"] = p.steady_speed_mm_s;
      jp["lifts"] = p.lifts;
      jp["tilt_hz"] = p.tilt_hz;
      jr["phases"].push_back(jp);
    }
    jr["turns"] = ordered_json::array();
    for (const auto& t : r.turns) {
      jr["turns"].push_back(
          {{"tick", t.tick}, {"from", t.from_axis}, {"to", t.to_axis}, {"angle_deg", t.angle_deg}});
    }
    jr["docks"] = ordered_json::array();
    for (const auto& d : r.docks) {
      jr["docks"].push_back({{"tick", d.tick},
                             {"other", d.other},
                             {"kind", d.formed ? "dock" : "undock"},
                             {"offset_mm", d.offset_mm}});
    }
    j["robots"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

}  // namespace smartlet::summary
