#include "smartlet/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "smartlet/errors.hpp"
#include "smartlet/program_text.hpp"

namespace smartlet::world {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const auto m = node.Mark();
  throw ParseError(what, m.line + 1, m.column + 1);
}

void only_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!ok.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, what + " has an invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
T get(const YAML::Node& map, const char* key, T fallback) {
  const auto n = map[key];
  return n ? scalar<T>(n, key) : fallback;
}

double nonneg(const YAML::Node& map, const char* key, double fallback) {
  const double v = get<double>(map, key, fallback);
  if (!(v >= 0) || !std::isfinite(v)) fail(map[key], std::string(key) + " must be >= 0");
  return v;
}

Vec2 point(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 2) fail(node, what + " must be [x, y]");
  return {scalar<double>(node[0], what), scalar<double>(node[1], what)};
}

Coat coat(const YAML::Node& node) {
  const auto s = scalar<std::string>(node, "coating");
  if (s == "philic" || s == "hydrophilic") return Coat::philic;
  if (s == "phobic" || s == "hydrophobic") return Coat::phobic;
  fail(node, "coating must be philic or phobic, got '" + s + "'");
}

FaceCoating face_coating(const YAML::Node& node) {
  if (node.IsScalar()) {
    const Coat c = coat(node);
    return {c, c};
  }
  only_keys(node, {"left", "right"}, "stripes coating");
  if (!node["left"] || !node["right"]) fail(node, "stripes coating needs left and right");
  return {coat(node["left"]), coat(node["right"])};
}

vm::LabletProgram program_node(const YAML::Node& node) {
  if (node.IsScalar()) {
    try {
      return vm::parse_program_text(node.as<std::string>());
    } catch (const ParseError& e) {
      // Report inside the block scalar: block starts on the line after the key.
      fail(node, std::string("program: ") + e.what());
    }
  }
  if (!node.IsMap()) fail(node, "program must be a mapping or program text");
  std::map<std::string, std::string> fields;
  std::map<std::string, std::pair<int, int>> where;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (kv.second.IsMap()) {
      for (const auto& inner : kv.second) {
        const auto full = key + "." + inner.first.as<std::string>();
        fields[full] = scalar<std::string>(inner.second, full);
        where[full] = {inner.second.Mark().line + 1, inner.second.Mark().column + 1};
      }
    } else {
      fields[key] = scalar<std::string>(kv.second, key);
      where[key] = {kv.second.Mark().line + 1, kv.second.Mark().column + 1};
    }
  }
  try {
    return vm::program_from_fields(fields, where);
  } catch (const ParseError& e) {
    if (e.line() == 0) fail(node, e.what());
    throw;
  }
}

optical::OpticalFrame led_frame(const YAML::Node& node) {
  only_keys(node, {"at_ms", "command", "program", "program_bits", "frame_hex"},
            "led_script entry");
  if (node["frame_hex"]) {
    try {
      return optical::frame_from_hex(scalar<std::string>(node["frame_hex"], "frame_hex"));
    } catch (const InvalidParameter& e) {
      fail(node["frame_hex"], e.what());
    }
  }
  if (!node["command"]) fail(node, "led_script entry needs a command");
  optical::OpticalFrame f;
  const auto cmd = scalar<std::string>(node["command"], "command");
  if (auto op = vm::parse_opcode(cmd)) {
    f.command = static_cast<std::uint8_t>(*op);
  } else {
    try {
      const auto v = std::stoul(cmd, nullptr, 0);
      if (v > 0xff) throw std::out_of_range(cmd);
      f.command = static_cast<std::uint8_t>(v);
    } catch (const std::exception&) {
      fail(node["command"], "unknown command '" + cmd + "'");
    }
  }
  if (node["program"]) {
    f.payload = vm::encode_run_command(program_node(node["program"]));
  } else if (node["program_bits"]) {
    try {
      f.payload = vm::parse_bit_string(scalar<std::string>(node["program_bits"], "program_bits"));
    } catch (const InvalidParameter& e) {
      fail(node["program_bits"], e.what());
    }
  }
  return f;
}

RobotSpec robot(const YAML::Node& node, const mech::BodyParams& defaults) {
  only_keys(node,
            {"id", "position", "heading_deg", "edge_mm", "wall_um", "dry_weight_uN",
             "fill_scenario", "walls", "coatings", "program", "program_bits", "autostart"},
            "robot");
  RobotSpec r;
  if (!node["id"]) fail(node, "robot needs an id");
  r.id = scalar<int>(node["id"], "id");
  if (!node["position"]) fail(node, "robot needs a position");
  r.position = point(node["position"], "position");
  r.heading_deg = get<double>(node, "heading_deg", 0.0);
  r.body = defaults;
  r.body.edge_mm = nonneg(node, "edge_mm", defaults.edge_mm);
  r.body.wall_um = nonneg(node, "wall_um", defaults.wall_um);
  r.body.dry_weight_uN = nonneg(node, "dry_weight_uN", defaults.dry_weight_uN);
  if (node["fill_scenario"]) {
    auto f = mech::parse_fill(scalar<std::string>(node["fill_scenario"], "fill_scenario"));
    if (!f) fail(node["fill_scenario"], "unknown fill_scenario");
    r.body.fill = *f;
  }
  if (node["walls"]) {
    auto w = mech::parse_walls(scalar<std::string>(node["walls"], "walls"));
    if (!w) fail(node["walls"], "unknown walls model");
    r.body.walls = *w;
  }
  if (const auto c = node["coatings"]) {
    if (!c.IsSequence() || c.size() != 4) fail(c, "coatings must list 4 faces (+x, +y, -x, -y)");
    for (std::size_t i = 0; i < 4; ++i) r.coatings[i] = face_coating(c[i]);
  }
  if (node["program"]) r.program = program_node(node["program"]);
  if (node["program_bits"]) {
    try {
      r.program = vm::decode_run_command(
          vm::parse_bit_string(scalar<std::string>(node["program_bits"], "program_bits")));
    } catch (const Error& e) {
      fail(node["program_bits"], e.what());
    }
  }
  r.autostart = get<bool>(node, "autostart", false);
  return r;
}

LightZone zone(const YAML::Node& node) {
  only_keys(node, {"id", "shape", "center", "radius_mm", "min", "max", "intensity_suns",
                   "enabled_at_ms", "enabled"},
            "light zone");
  LightZone z;
  z.id = get<std::string>(node, "id", "");
  const auto shape = get<std::string>(node, "shape", "disc");
  if (shape == "disc") {
    z.shape = LightZone::Shape::disc;
    if (!node["center"]) fail(node, "disc zone needs a center");
    z.center = point(node["center"], "center");
    z.radius_mm = nonneg(node, "radius_mm", 1.0);
  } else if (shape == "rect") {
    z.shape = LightZone::Shape::rect;
    if (!node["min"] || !node["max"]) fail(node, "rect zone needs min and max");
    z.min = point(node["min"], "min");
    z.max = point(node["max"], "max");
  } else {
    fail(node["shape"], "zone shape must be disc or rect");
  }
  z.intensity_suns = nonneg(node, "intensity_suns", 5.0);
  z.enabled_at_ms = nonneg(node, "enabled_at_ms", 0.0);
  z.enabled = get<bool>(node, "enabled", true);
  return z;
}

}  // namespace

std::string to_string(const FaceCoating& c) {
  auto s = [](Coat k) { return k == Coat::philic ? "philic" : "phobic"; };
  if (!c.striped()) return s(c.left);
  return std::string(s(c.left)) + "/" + s(c.right);
}

bool LightZone::contains(Vec2 p) const {
  if (shape == Shape::disc) {
    const double dx = p.x - center.x, dy = p.y - center.y;
    return dx * dx + dy * dy <= radius_mm * radius_mm;
  }
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
}

double Scenario::ambient_at(double now_ms) const {
  double suns = ambient_suns;
  for (const auto& step : ambient_schedule) {
    if (now_ms >= step.at_ms) suns = step.suns;
  }
  return suns;
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || !root.IsMap()) throw ParseError("scenario must be a YAML mapping", 1, 1);
  only_keys(root,
            {"scenario_version", "name", "seed", "ticks", "arena", "film_depth_um",
             "ambient_suns", "ambient_schedule", "power_threshold_suns", "light_zones", "laser",
             "led", "led_script", "robots", "physics", "fluid", "docking"},
            "scenario");
  if (!root["scenario_version"]) throw ParseError("missing scenario_version", 1, 1);
  if (scalar<int>(root["scenario_version"], "scenario_version") != 1) {
    fail(root["scenario_version"], "unsupported scenario_version (expected 1)");
  }
  Scenario s;
  s.name = get<std::string>(root, "name", "");
  s.seed = get<std::uint64_t>(root, "seed", 0);
  s.ticks = get<std::int64_t>(root, "ticks", 0);
  if (s.ticks < 0) fail(root["ticks"], "ticks must be >= 0");
  if (const auto a = root["arena"]) {
    only_keys(a, {"width_mm", "height_mm"}, "arena");
    s.arena_width_mm = nonneg(a, "width_mm", 70.0);
    s.arena_height_mm = nonneg(a, "height_mm", 70.0);
  }
  s.fluid.film_depth_um = nonneg(root, "film_depth_um", 500.0);
  if (const auto f = root["fluid"]) {
    only_keys(f, {"rho", "g", "eta_mpa_s"}, "fluid");
    s.fluid.rho = nonneg(f, "rho", s.fluid.rho);
    s.fluid.g = nonneg(f, "g", s.fluid.g);
    s.fluid.eta_mpa_s = nonneg(f, "eta_mpa_s", s.fluid.eta_mpa_s);
  }
  s.ambient_suns = nonneg(root, "ambient_suns", 1.0);
  if (const auto sched = root["ambient_schedule"]) {
    if (!sched.IsSequence()) fail(sched, "ambient_schedule must be a list");
    for (const auto& e : sched) {
      only_keys(e, {"at_ms", "suns"}, "ambient_schedule entry");
      s.ambient_schedule.push_back({nonneg(e, "at_ms", 0.0), nonneg(e, "suns", 1.0)});
    }
  }
  s.power_threshold_suns = nonneg(root, "power_threshold_suns", 0.5);
  if (const auto zs = root["light_zones"]) {
    if (!zs.IsSequence()) fail(zs, "light_zones must be a list");
    for (const auto& z : zs) s.zones.push_back(zone(z));
  }
  if (const auto l = root["laser"]) {
    only_keys(l, {"position", "radius_mm", "intensity_suns", "wavelength_nm", "on"}, "laser");
    if (l["position"]) s.laser.position = point(l["position"], "laser position");
    s.laser.radius_mm = nonneg(l, "radius_mm", s.laser.radius_mm);
    s.laser.intensity_suns = nonneg(l, "intensity_suns", s.laser.intensity_suns);
    s.laser.wavelength_nm = nonneg(l, "wavelength_nm", s.laser.wavelength_nm);
    s.laser.on = get<bool>(l, "on", false);
  }
  if (const auto l = root["led"]) {
    only_keys(l, {"half_bit_ms", "intensity_suns", "jitter"}, "led");
    s.led.half_bit_ms = nonneg(l, "half_bit_ms", s.led.half_bit_ms);
    if (!(s.led.half_bit_ms > 0)) fail(l["half_bit_ms"], "half_bit_ms must be > 0");
    s.led.intensity_suns = nonneg(l, "intensity_suns", s.led.intensity_suns);
    s.led.jitter = nonneg(l, "jitter", s.led.jitter);
    if (s.led.jitter >= 0.5) fail(l["jitter"], "jitter must be < 0.5 half-bit");
  }
  if (const auto script = root["led_script"]) {
    if (!script.IsSequence()) fail(script, "led_script must be a list");
    for (const auto& e : script) {
      LedCommand c;
      c.frame = led_frame(e);
      c.at_ms = nonneg(e, "at_ms", 0.0);
      s.led_script.push_back(c);
    }
    std::stable_sort(s.led_script.begin(), s.led_script.end(),
                     [](const LedCommand& a, const LedCommand& b) { return a.at_ms < b.at_ms; });
  }
  if (const auto p = root["physics"]) {
    only_keys(p, {"release_interval_ms", "tau_v_s", "tau_rot_ms", "switch_rotation_deg",
                  "contact_fraction", "fill_time_ms", "rate_jitter", "critical_fraction",
                  "linger_ms"},
              "physics");
    s.ratchet.release_interval_ms = nonneg(p, "release_interval_ms", s.ratchet.release_interval_ms);
    s.ratchet.tau_v_s = nonneg(p, "tau_v_s", s.ratchet.tau_v_s);
    s.ratchet.tau_rot_ms = nonneg(p, "tau_rot_ms", s.ratchet.tau_rot_ms);
    s.ratchet.switch_rotation_deg = get<double>(p, "switch_rotation_deg", s.ratchet.switch_rotation_deg);
    s.ratchet.contact_fraction = nonneg(p, "contact_fraction", s.ratchet.contact_fraction);
    s.bubbles.fill_time_ms = nonneg(p, "fill_time_ms", s.bubbles.fill_time_ms);
    s.bubbles.rate_jitter = nonneg(p, "rate_jitter", s.bubbles.rate_jitter);
    s.bubbles.critical_fraction = nonneg(p, "critical_fraction", s.bubbles.critical_fraction);
    s.bubbles.linger_ms = nonneg(p, "linger_ms", s.bubbles.linger_ms);
  }
  if (const auto d = root["docking"]) {
    only_keys(d, {"range_mm", "force_scale_nN", "philic_philic", "mixed", "phobic_phobic",
                  "contact_mm", "align_deg"},
              "docking");
    auto& k = s.docking;
    k.range_mm = nonneg(d, "range_mm", k.range_mm);
    if (!(k.range_mm > 0)) fail(d["range_mm"], "range_mm must be > 0");
    k.force_scale_nN = nonneg(d, "force_scale_nN", k.force_scale_nN);
    k.philic_philic = get<double>(d, "philic_philic", k.philic_philic);
    k.mixed = get<double>(d, "mixed", k.mixed);
    k.phobic_phobic = get<double>(d, "phobic_phobic", k.phobic_phobic);
    k.contact_mm = nonneg(d, "contact_mm", k.contact_mm);
    k.align_deg = nonneg(d, "align_deg", k.align_deg);
  }
  if (const auto rs = root["robots"]) {
    if (!rs.IsSequence()) fail(rs, "robots must be a list");
    std::set<int> ids;
    for (const auto& r : rs) {
      auto spec = robot(r, {});
      if (!ids.insert(spec.id).second) fail(r["id"], "duplicate robot id " + std::to_string(spec.id));
      s.robots.push_back(std::move(spec));
    }
  }
  try {
    validate(s);
  } catch (const InvalidParameter& e) {
    throw ParseError(e.what(), 1, 1);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

void validate(const Scenario& s) {
  for (const auto& r : s.robots) {
    const double h = r.body.edge_mm / 2;
    if (r.position.x < h || r.position.y < h || r.position.x > s.arena_width_mm - h ||
        r.position.y > s.arena_height_mm - h) {
      throw InvalidParameter("robot " + std::to_string(r.id) + " lies outside the arena");
    }
    if (!(r.body.edge_mm > 0)) throw InvalidParameter("edge_mm must be > 0");
  }
  for (const auto& z : s.zones) {
    if (z.intensity_suns < 0) throw InvalidParameter("zone intensity must be >= 0");
  }
  if (s.laser.intensity_suns < 0 || s.ambient_suns < 0) {
    throw InvalidParameter("intensities must be >= 0");
  }
}

namespace {

void emit_program(YAML::Emitter& out, const vm::LabletProgram& p) {
  out << YAML::BeginMap;
  std::istringstream text(vm::format_program_text(p));
  std::string line;
  while (std::getline(text, line)) {
    const auto eq = line.find(" = ");
    out << YAML::Key << line.substr(0, eq) << YAML::Value << line.substr(eq + 3);
  }
  out << YAML::EndMap;
}

void emit_point(YAML::Emitter& out, Vec2 p) {
  out << YAML::Flow << YAML::BeginSeq << p.x << p.y << YAML::EndSeq;
}

}  // namespace

std::string to_yaml(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scenario_version" << YAML::Value << 1;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "ticks" << YAML::Value << s.ticks;
  out << YAML::Key << "arena" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
      << "width_mm" << YAML::Value << s.arena_width_mm << YAML::Key << "height_mm"
      << YAML::Value << s.arena_height_mm << YAML::EndMap;
  out << YAML::Key << "film_depth_um" << YAML::Value << s.fluid.film_depth_um;
  out << YAML::Key << "fluid" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
      << "rho" << YAML::Value << s.fluid.rho << YAML::Key << "g" << YAML::Value << s.fluid.g
      << YAML::Key << "eta_mpa_s" << YAML::Value << s.fluid.eta_mpa_s << YAML::EndMap;
  out << YAML::Key << "ambient_suns" << YAML::Value << s.ambient_suns;
  out << YAML::Key << "ambient_schedule" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : s.ambient_schedule) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "at_ms" << YAML::Value << a.at_ms
        << YAML::Key << "suns" << YAML::Value << a.suns << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "power_threshold_suns" << YAML::Value << s.power_threshold_suns;
  out << YAML::Key << "light_zones" << YAML::Value << YAML::BeginSeq;
  for (const auto& z : s.zones) {
    out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << z.id;
    if (z.shape == LightZone::Shape::disc) {
      out << YAML::Key << "shape" << YAML::Value << "disc" << YAML::Key << "center" << YAML::Value;
      emit_point(out, z.center);
      out << YAML::Key << "radius_mm" << YAML::Value << z.radius_mm;
    } else {
      out << YAML::Key << "shape" << YAML::Value << "rect" << YAML::Key << "min" << YAML::Value;
      emit_point(out, z.min);
      out << YAML::Key << "max" << YAML::Value;
      emit_point(out, z.max);
    }
    out << YAML::Key << "intensity_suns" << YAML::Value << z.intensity_suns << YAML::Key
        << "enabled_at_ms" << YAML::Value << z.enabled_at_ms << YAML::Key << "enabled"
        << YAML::Value << z.enabled << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "laser" << YAML::Value << YAML::BeginMap << YAML::Key << "position"
      << YAML::Value;
  emit_point(out, s.laser.position);
  out << YAML::Key << "radius_mm" << YAML::Value << s.laser.radius_mm << YAML::Key
      << "intensity_suns" << YAML::Value << s.laser.intensity_suns << YAML::Key
      << "wavelength_nm" << YAML::Value << s.laser.wavelength_nm << YAML::Key << "on"
      << YAML::Value << s.laser.on << YAML::EndMap;
  out << YAML::Key << "led" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
      << "half_bit_ms" << YAML::Value << s.led.half_bit_ms << YAML::Key << "intensity_suns"
      << YAML::Value << s.led.intensity_suns << YAML::Key << "jitter" << YAML::Value
      << s.led.jitter << YAML::EndMap;
  out << YAML::Key << "led_script" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : s.led_script) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "at_ms" << YAML::Value << c.at_ms
        << YAML::Key << "frame_hex" << YAML::Value << optical::to_hex(c.frame) << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "physics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "release_interval_ms" << YAML::Value << s.ratchet.release_interval_ms;
  out << YAML::Key << "tau_v_s" << YAML::Value << s.ratchet.tau_v_s;
  out << YAML::Key << "tau_rot_ms" << YAML::Value << s.ratchet.tau_rot_ms;
  out << YAML::Key << "switch_rotation_deg" << YAML::Value << s.ratchet.switch_rotation_deg;
  out << YAML::Key << "contact_fraction" << YAML::Value << s.ratchet.contact_fraction;
  out << YAML::Key << "fill_time_ms" << YAML::Value << s.bubbles.fill_time_ms;
  out << YAML::Key << "rate_jitter" << YAML::Value << s.bubbles.rate_jitter;
  out << YAML::Key << "critical_fraction" << YAML::Value << s.bubbles.critical_fraction;
  out << YAML::Key << "linger_ms" << YAML::Value << s.bubbles.linger_ms;
  out << YAML::EndMap;
  out << YAML::Key << "docking" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "range_mm" << YAML::Value << s.docking.range_mm;
  out << YAML::Key << "force_scale_nN" << YAML::Value << s.docking.force_scale_nN;
  out << YAML::Key << "philic_philic" << YAML::Value << s.docking.philic_philic;
  out << YAML::Key << "mixed" << YAML::Value << s.docking.mixed;
  out << YAML::Key << "phobic_phobic" << YAML::Value << s.docking.phobic_phobic;
  out << YAML::Key << "contact_mm" << YAML::Value << s.docking.contact_mm;
  out << YAML::Key << "align_deg" << YAML::Value << s.docking.align_deg;
  out << YAML::EndMap;
  out << YAML::Key << "robots" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : s.robots) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << r.id;
    out << YAML::Key << "position" << YAML::Value;
    emit_point(out, r.position);
    out << YAML::Key << "heading_deg" << YAML::Value << r.heading_deg;
    out << YAML::Key << "edge_mm" << YAML::Value << r.body.edge_mm;
    out << YAML::Key << "wall_um" << YAML::Value << r.body.wall_um;
    out << YAML::Key << "dry_weight_uN" << YAML::Value << r.body.dry_weight_uN;
    out << YAML::Key << "fill_scenario" << YAML::Value << std::string(mech::to_string(r.body.fill));
    out << YAML::Key << "walls" << YAML::Value << std::string(mech::to_string(r.body.walls));
    out << YAML::Key << "coatings" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& c : r.coatings) {
      auto name = [](Coat k) { return k == Coat::philic ? "philic" : "phobic"; };
      if (c.striped()) {
        out << YAML::BeginMap << YAML::Key << "left" << YAML::Value << name(c.left) << YAML::Key
            << "right" << YAML::Value << name(c.right) << YAML::EndMap;
      } else {
        out << name(c.left);
      }
    }
    out << YAML::EndSeq;
    if (r.program) {
      out << YAML::Key << "program" << YAML::Value;
      emit_program(out, *r.program);
    }
    out << YAML::Key << "autostart" << YAML::Value << r.autostart;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace smartlet::world
