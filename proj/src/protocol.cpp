#include "smartlet/protocol.hpp"

#include "smartlet/errors.hpp"
#include "smartlet/lablet_vm.hpp"

namespace smartlet::proto {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidParameter(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) throw InvalidParameter(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

json point(world::Vec2 p) { return json::array({p.x, p.y}); }

std::string bits3(std::uint8_t v) {
  std::string s;
  for (int i = 2; i >= 0; --i) s += (v >> i) & 1 ? '1' : '0';
  return s;
}

}  // namespace

json envelope(const std::string& session_id, std::int64_t seq, const std::string& kind,
              json payload) {
  return {{"session_id", session_id}, {"seq", seq}, {"kind", kind}, {"payload", std::move(payload)}};
}

json to_json(const world::Snapshot& s) {
  json j;
  j["tick"] = s.tick;
  j["t_ms"] = s.t_ms;
  j["ambient_suns"] = s.ambient_suns;
  j["led_busy"] = s.led_busy;
  j["laser"] = {{"position", point(s.laser.position)},
                {"radius_mm", s.laser.radius_mm},
                {"intensity_suns", s.laser.intensity_suns},
                {"on", s.laser.on}};
  j["zones"] = json::array();
  for (const auto& z : s.zones) {
    json jz{{"id", z.id},
            {"shape", z.shape == world::LightZone::Shape::disc ? "disc" : "rect"},
            {"intensity_suns", z.intensity_suns},
            {"enabled", z.enabled},
            {"active", z.active(s.t_ms)}};
    if (z.shape == world::LightZone::Shape::disc) {
      jz["center"] = point(z.center);
      jz["radius_mm"] = z.radius_mm;
    } else {
      jz["min"] = point(z.min);
      jz["max"] = point(z.max);
    }
    j["zones"].push_back(jz);
  }
  j["robots"] = json::array();
  for (const auto& r : s.robots) {
    json coat = json::array();
    for (const auto& c : r.coatings) coat.push_back(world::to_string(c));
    j["robots"].push_back({{"id", r.id},
                           {"position", point(r.position)},
                           {"heading_deg", r.heading_deg},
                           {"edge_mm", r.edge_mm},
                           {"tilt_deg", r.tilt_deg},
                           {"tilted_actuator", r.tilted_actuator ? json(*r.tilted_actuator) : json()},
                           {"velocity", json::array({r.vx, r.vy})},
                           {"powered", r.powered},
                           {"running", r.running},
                           {"phase", r.phase},
                           {"act", bits3(r.act)},
                           {"din", r.din},
                           {"pd_volts", r.pd_volts},
                           {"bubble_fill", r.bubble_fill},
                           {"bubble_count", r.bubble_count},
                           {"coatings", coat},
                           {"has_program", r.has_program}});
  }
  j["links"] = json::array();
  for (const auto& l : s.links) {
    j["links"].push_back({{"robot_a", l.robot_a},
                          {"robot_b", l.robot_b},
                          {"face_a", l.face_a},
                          {"face_b", l.face_b},
                          {"lateral_offset_mm", l.lateral_offset_mm},
                          {"bond_nN", l.bond_nN}});
  }
  return j;
}

json to_json(const log::Event& e) {
  json fields = json::object();
  for (const auto& [k, v] : e.fields) fields[k] = v;
  return {{"tick", e.tick},
          {"robot", e.robot < 0 ? json() : json(e.robot)},
          {"kind", std::string(log::to_string(e.kind))},
          {"fields", fields},
          {"line", log::format_event(e)}};
}

bool is_world_command(const std::string& kind) {
  return kind == "move_laser" || kind == "toggle_zone" || kind == "emit_frame" ||
         kind == "place_robot" || kind == "reset";
}

world::Command command_from_json(const std::string& kind, const json& p,
                                 const world::Scenario& context) {
  if (kind == "move_laser") {
    world::MoveLaser c;
    c.position = {number(p, "x"), number(p, "y")};
    if (p.contains("on")) c.on = p.at("on").get<bool>();
    if (c.position.x < 0 || c.position.y < 0 || c.position.x > context.arena_width_mm ||
        c.position.y > context.arena_height_mm) {
      throw InvalidParameter("laser position outside the arena");
    }
    return c;
  }
  if (kind == "toggle_zone") {
    const auto& id = require(p, "id");
    if (!id.is_string()) throw InvalidParameter("zone id must be a string");
    return world::ToggleZone{id.get<std::string>()};
  }
  if (kind == "emit_frame") {
    world::EmitFrame c;
    if (p.contains("frame_hex")) {
      c.frame = optical::frame_from_hex(p.at("frame_hex").get<std::string>());
      return c;
    }
    const auto& cmd = require(p, "command");
    if (cmd.is_string()) {
      const auto op = vm::parse_opcode(cmd.get<std::string>());
      if (!op) throw InvalidParameter("unknown command '" + cmd.get<std::string>() + "'");
      c.frame.command = static_cast<std::uint8_t>(*op);
    } else if (cmd.is_number_unsigned() && cmd.get<unsigned>() <= 0xff) {
      c.frame.command = static_cast<std::uint8_t>(cmd.get<unsigned>());
    } else {
      throw InvalidParameter("command must be a name or a byte");
    }
    if (p.contains("program_bits")) {
      c.frame.payload = vm::parse_bit_string(p.at("program_bits").get<std::string>());
    }
    return c;
  }
  if (kind == "place_robot") {
    // JSON is a YAML subset: reuse the scenario robot schema and its checks.
    const json& robot = require(p, "robot");
    const std::string doc = "scenario_version: 1\narena: {width_mm: " +
                            json(context.arena_width_mm).dump() +
                            ", height_mm: " + json(context.arena_height_mm).dump() +
                            "}\nrobots: [" + robot.dump() + "]\n";
    auto sc = world::parse_scenario(doc);
    return world::PlaceRobot{sc.robots.at(0)};
  }
  if (kind == "reset") {
    world::ResetWorld c;
    c.seed = p.contains("seed") ? p.at("seed").get<std::uint64_t>() : context.seed;
    return c;
  }
  throw InvalidParameter("unknown command kind '" + kind + "'");
}

json to_json(const Recording& r) {
  json cmds = json::array();
  for (const auto& c : r.commands) {
    cmds.push_back({{"step", c.step}, {"kind", c.kind}, {"payload", c.payload}});
  }
  return {{"format", "smartlet-recording"},
          {"version", 1},
          {"scenario_yaml", r.scenario_yaml},
          {"commands", cmds},
          {"steps", r.steps}};
}

Recording recording_from_json(const json& j) {
  if (j.value("format", "") != "smartlet-recording" || j.value("version", 0) != 1) {
    throw InvalidParameter("not a smartlet-recording v1 document");
  }
  Recording r;
  r.scenario_yaml = j.at("scenario_yaml").get<std::string>();
  r.steps = j.at("steps").get<std::int64_t>();
  std::int64_t last = 0;
  for (const auto& c : j.at("commands")) {
    RecordedCommand rc{c.at("step").get<std::int64_t>(), c.at("kind").get<std::string>(),
                       c.value("payload", json::object())};
    if (rc.step < last || rc.step > r.steps) throw InvalidParameter("command steps out of order");
    last = rc.step;
    r.commands.push_back(std::move(rc));
  }
  return r;
}

log::EventLog replay_log(const Recording& r) {
  const auto sc = world::parse_scenario(r.scenario_yaml);
  world::World w(sc);
  log::EventLog out(sc.name);
  std::int64_t steps = 0;
  std::size_t next = 0;
  while (true) {
    while (next < r.commands.size() && r.commands[next].step == steps) {
      const auto& c = r.commands[next++];
      w.apply(command_from_json(c.kind, c.payload, w.scenario()));
    }
    if (steps >= r.steps) break;
    out.append(w.step());
    ++steps;
  }
  return out;
}

std::string replay(const Recording& r) { return replay_log(r).render(r.steps, 0.0); }

}  // namespace smartlet::proto
