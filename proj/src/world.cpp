#include "smartlet/world.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "smartlet/errors.hpp"

namespace smartlet::world {

namespace {

constexpr double kDeg = M_PI / 180.0;

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
Vec2 unit(double deg) { return {std::cos(deg * kDeg), std::sin(deg * kDeg)}; }
Vec2 rotate(Vec2 v, double deg) {
  const double c = std::cos(deg * kDeg), s = std::sin(deg * kDeg);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double wrap_deg(double d) {
  d = std::fmod(d, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

double coefficient(Coat a, Coat b, const DockingParams& p) {
  if (a == Coat::philic && b == Coat::philic) return p.philic_philic;
  if (a == Coat::phobic && b == Coat::phobic) return p.phobic_phobic;
  return p.mixed;
}

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

std::string bits3(std::uint8_t v) {
  std::string s;
  for (int i = 2; i >= 0; --i) s += (v >> i) & 1 ? '1' : '0';
  return s;
}

std::string command_name(std::uint8_t c) {
  if (c >= 1 && c <= 4) return std::string(vm::to_string(static_cast<vm::Opcode>(c)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02x", c);
  return buf;
}

std::string token(std::string s) {
  for (auto& ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '=') ch = '_';
  }
  return s;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

double mobility_mm_s_per_nN(double edge_mm, double eta_mpa_s) {
  // v = F / (6 pi eta R); nN and mPa s cancel to m/s per 1e-6, i.e. mm/s per 1e-3.
  return 1.0 / (6.0 * M_PI * eta_mpa_s * (edge_mm / 2.0));
}

double segment_overlap(const FaceCoating& a, double la, const FaceCoating& b, double lb,
                       double o, const DockingParams& p) {
  // A halves in A's tangent coordinate; B's halves map through s_a = o - s_b.
  const double a_left[2] = {-la / 2, 0.0}, a_right[2] = {0.0, la / 2};
  const double b_left[2] = {o, o + lb / 2}, b_right[2] = {o - lb / 2, o};
  double s = 0.0;
  s += coefficient(a.left, b.left, p) * overlap(a_left[0], a_left[1], b_left[0], b_left[1]);
  s += coefficient(a.left, b.right, p) * overlap(a_left[0], a_left[1], b_right[0], b_right[1]);
  s += coefficient(a.right, b.left, p) * overlap(a_right[0], a_right[1], b_left[0], b_left[1]);
  s += coefficient(a.right, b.right, p) * overlap(a_right[0], a_right[1], b_right[0], b_right[1]);
  return s / std::min(la, lb);
}

FaceForce docking_interaction(const FaceCoating& a, const FaceCoating& b, double gap_mm,
                              double offset_mm, const DockingParams& p, double edge_mm) {
  FaceForce f;
  const double g = std::max(0.0, gap_mm);
  if (g > p.range_mm) return f;
  const double profile = 1.0 - g / p.range_mm;
  const double s = segment_overlap(a, edge_mm, b, edge_mm, offset_mm, p);
  constexpr double h = 1e-4;
  const double ds = (segment_overlap(a, edge_mm, b, edge_mm, offset_mm + h, p) -
                     segment_overlap(a, edge_mm, b, edge_mm, offset_mm - h, p)) /
                    (2 * h);
  f.normal_nN = p.force_scale_nN * profile * s;
  f.lateral_nN = p.force_scale_nN * profile * ds;
  f.dock = gap_mm < p.contact_mm && s > 0;
  return f;
}

double equilibrium_offset(const FaceCoating& a, const FaceCoating& b, double start,
                          const DockingParams& p, double edge_mm) {
  constexpr double step = 1e-3;
  const double lim = edge_mm / 2;
  double o = std::clamp(start, -lim, lim);
  auto score = [&](double x) { return segment_overlap(a, edge_mm, b, edge_mm, x, p); };
  const double dir = score(o + step) > score(o - step) ? 1.0 : -1.0;
  while (std::abs(o + dir * step) <= lim + 1e-12 && score(o + dir * step) > score(o) + 1e-12) {
    o += dir * step;
  }
  // Snap to a kink when within one step of it.
  const double r = std::round(o / (edge_mm / 2)) * (edge_mm / 2);
  if (std::abs(r - o) < step && score(r) >= score(o)) o = r;
  return std::clamp(o, -lim, lim);
}

World::World(Scenario scenario) : scenario_(std::move(scenario)) {
  validate(scenario_);
  original_ = scenario_;
  build(scenario_.seed);
}

void World::build(std::uint64_t seed) {
  seed_ = seed;
  tick_ = 0;
  links_.clear();
  frames_.clear();
  next_script_ = 0;
  frame_index_ = 0;
  comparator_ = photo::default_comparator(pd_model_);
  robots_.clear();
  auto specs = scenario_.robots;
  std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& s : specs) robots_.push_back(make_robot(s));
}

World::Robot World::make_robot(const RobotSpec& spec) const {
  Robot r;
  r.spec = spec;
  r.pos = spec.position;
  r.heading_deg = wrap_deg(spec.heading_deg);
  if (spec.program) r.lablet = vm::Lablet(*spec.program, spec.autostart);
  r.ratchet = mech::Ratchet(scenario_.ratchet, scenario_.bubbles, spec.body, scenario_.fluid);
  r.rng = Rng(stream_seed(seed_, static_cast<std::uint64_t>(spec.id)));
  const double v = pd_model_.voltage(light_intensity_at(r.pos));
  r.pd = photo::PdTransient(pd_model_, v);
  r.comparator = comparator_.step(v, false);
  return r;
}

double World::light_intensity_at(Vec2 p, double elevation_deg) const {
  const double now = now_ms();
  double directional = 0.0;
  for (const auto& z : scenario_.zones) {
    if (z.active(now) && z.contains(p)) directional += z.intensity_suns;
  }
  const auto& l = scenario_.laser;
  if (l.on) {
    const double dx = p.x - l.position.x, dy = p.y - l.position.y;
    if (dx * dx + dy * dy <= l.radius_mm * l.radius_mm) directional += l.intensity_suns;
  }
  return photo::effective_suns({scenario_.ambient_at(now), directional, elevation_deg});
}

bool World::powered_at(double now) const {
  return scenario_.ambient_at(now) >= scenario_.power_threshold_suns;
}

void World::schedule_frame(const optical::OpticalFrame& frame, double at_ms) {
  ScheduledFrame f;
  f.start_ms = at_ms;
  f.waveform = optical::manchester_encode(frame, scenario_.led.half_bit_ms);
  if (scenario_.led.jitter > 0) {
    Rng rng(stream_seed(seed_, kLedJitterStream + frame_index_));
    f.waveform = optical::jitter_edges(f.waveform, scenario_.led.jitter, rng);
  }
  ++frame_index_;
  frames_.push_back(std::move(f));
}

int World::led_level(double t) const {
  for (const auto& f : frames_) {
    const double rel = t - f.start_ms;
    if (rel >= 0 && rel < f.waveform.duration_ms() && f.waveform.level_at(rel)) return 1;
  }
  return 0;
}

Vec2 World::face_center(const Robot& r, int face) const {
  return r.pos + (r.spec.body.edge_mm / 2) * unit(r.heading_deg + 90.0 * face);
}

std::vector<int> World::groups() const {
  UnionFind uf(robots_.size());
  std::map<int, int> index;
  for (std::size_t i = 0; i < robots_.size(); ++i) index[robots_[i].spec.id] = static_cast<int>(i);
  for (const auto& l : links_) uf.unite(index.at(l.robot_a), index.at(l.robot_b));
  std::vector<int> g(robots_.size());
  for (std::size_t i = 0; i < robots_.size(); ++i) g[i] = uf.find(static_cast<int>(i));
  return g;
}

void World::move_group(const std::vector<int>& group_of, int gid, Vec2 delta, double dtheta,
                       Vec2 pivot) {
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    if (group_of[i] != gid) continue;
    auto& r = robots_[i];
    if (dtheta != 0.0) {
      r.pos = pivot + rotate(r.pos - pivot, dtheta);
      r.heading_deg = wrap_deg(r.heading_deg + dtheta);
    }
    r.pos = r.pos + delta;
  }
}

void World::apply(const Command& command) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, MoveLaser>) {
          scenario_.laser.position = c.position;
          scenario_.laser.on = c.on;
        } else if constexpr (std::is_same_v<T, ToggleZone>) {
          auto it = std::find_if(scenario_.zones.begin(), scenario_.zones.end(),
                                 [&](const LightZone& z) { return z.id == c.id; });
          if (it == scenario_.zones.end()) throw InvalidParameter("unknown zone '" + c.id + "'");
          it->enabled = !it->enabled;
        } else if constexpr (std::is_same_v<T, EmitFrame>) {
          schedule_frame(c.frame, now_ms());
        } else if constexpr (std::is_same_v<T, PlaceRobot>) {
          Scenario probe = scenario_;
          probe.robots = {c.robot};
          validate(probe);
          std::erase_if(links_, [&](const DockLink& l) {
            return l.robot_a == c.robot.id || l.robot_b == c.robot.id;
          });
          auto it = std::find_if(robots_.begin(), robots_.end(),
                                 [&](const Robot& r) { return r.spec.id == c.robot.id; });
          if (it != robots_.end()) {
            *it = make_robot(c.robot);
          } else {
            robots_.push_back(make_robot(c.robot));
            std::sort(robots_.begin(), robots_.end(),
                      [](const Robot& a, const Robot& b) { return a.spec.id < b.spec.id; });
          }
        } else if constexpr (std::is_same_v<T, ResetWorld>) {
          scenario_ = original_;
          build(c.seed);
        }
      },
      command);
}

std::vector<log::Event> World::step() {
  std::vector<log::Event> events;
  const double t0 = now_ms();
  const double t1 = t0 + kTickMs;
  const double ambient = scenario_.ambient_at(t0);
  const bool powered = ambient >= scenario_.power_threshold_suns;

  auto& script = scenario_.led_script;
  while (next_script_ < script.size() && script[next_script_].at_ms < t1) {
    schedule_frame(script[next_script_].frame, script[next_script_].at_ms);
    ++next_script_;
  }
  std::erase_if(frames_, [&](const ScheduledFrame& f) {
    return f.start_ms + f.waveform.duration_ms() < t0;
  });

  auto event = [&](int robot, log::Kind kind) -> log::Event& {
    events.push_back({tick_, robot, kind, {}});
    return events.back();
  };

  std::vector<mech::MotionStep> motion(robots_.size());
  std::vector<bool> transitioned(robots_.size(), false);
  const double sub_ms = kTickMs / kPdSubsteps;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto& r = robots_[i];
    const int id = r.spec.id;

    if (powered != r.powered) {
      if (!powered) {
        r.lablet.power_loss();
        r.rx.clear();
      }
      r.powered = powered;
      event(id, log::Kind::power).add("on", std::int64_t{powered}).add("ambient", ambient, 3);
    }

    // Light fields are constant over the tick except for the LED waveform.
    const double base = light_intensity_at(r.pos);
    const double led_suns =
        scenario_.led.intensity_suns * photo::angular_kernel(90.0);
    for (int k = 0; k < kPdSubsteps; ++k) {
      const double ts = t0 + k * sub_ms;
      const double suns = base + (led_level(ts) ? led_suns : 0.0);
      r.pd.step(pd_model_.voltage(suns), sub_ms * 1000.0);
      r.comparator = comparator_.step(r.pd.value(), r.comparator);
      if (r.powered) r.rx.sample(ts + sub_ms, r.comparator ? 1 : 0);
    }
    if (r.comparator != r.din) {
      r.din = r.comparator;
      event(id, log::Kind::din).add("value", std::int64_t{r.din});
    }

    std::uint8_t act = 0;
    if (r.powered) {
      if (auto res = r.rx.poll(t1)) {
        auto& e = event(id, log::Kind::frame_rx);
        if (res->frame) {
          const auto outcome = r.lablet.apply(res->frame->command, res->frame->payload);
          const char* names[] = {"applied", "rejected", "ignored"};
          e.add("command", command_name(res->frame->command))
              .add("outcome", names[static_cast<int>(outcome)])
              .add("frame", optical::to_hex(*res->frame));
        } else {
          e.add("error", token(res->error));
        }
      }
      const auto before = r.lablet.state().phase;
      const auto step = r.lablet.step(r.din);
      act = step.act_out;
      if (step.transitioned_from) {
        transitioned[i] = true;
        event(id, log::Kind::phase_transition)
            .add("from", std::int64_t{static_cast<int>(before)})
            .add("to", std::int64_t{static_cast<int>(step.state.phase)});
      }
    }
    if (act != r.act) {
      r.act = act;
      event(id, log::Kind::act).add("bits", bits3(act));
    }

    std::array<int, 3> before_counts{};
    for (int a = 0; a < 3; ++a) before_counts[a] = r.ratchet.faces()[a].count;
    motion[i] = r.ratchet.step(r.act, t0, kTickMs, r.heading_deg, r.rng);
    const auto& ev = motion[i].events;
    if (ev.switched_from && ev.rotation_deg) {
      event(id, log::Kind::bubble)
          .add("event", "detach")
          .add("actuator", std::int64_t{*ev.switched_from})
          .add("released", std::int64_t{ev.released[*ev.switched_from]})
          .add("rot", *ev.rotation_deg, 2);
    }
    for (int a = 0; a < 3; ++a) {
      if (before_counts[a] == 0 && ev.nucleated[a] > 0) {
        event(id, log::Kind::bubble)
            .add("event", "nucleate")
            .add("actuator", std::int64_t{a})
            .add("count", std::int64_t{r.ratchet.faces()[a].count});
      }
    }
    if (ev.lifted_face) {
      const int a = *ev.lifted_face;
      event(id, log::Kind::bubble)
          .add("event", "lift")
          .add("actuator", std::int64_t{a})
          .add("count", std::int64_t{r.ratchet.faces()[a].count})
          .add("tilt", r.ratchet.tilt_deg(), 2);
    }
    if (ev.reseated_face) {
      const int a = *ev.reseated_face;
      event(id, log::Kind::bubble)
          .add("event", "reseat")
          .add("actuator", std::int64_t{a})
          .add("cycle_ms", ev.cycle_ms, 1)
          .add("released", std::int64_t{ev.released[a]});
    }
  }

  // Rigid group motion: mean member displacement, mean rotation about the
  // group centroid.
  auto group_of = groups();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < robots_.size(); ++i) members[group_of[i]].push_back(i);
  for (const auto& [gid, idx] : members) {
    Vec2 delta, centroid;
    double dtheta = 0.0;
    for (auto i : idx) {
      delta = delta + Vec2{motion[i].dx_mm, motion[i].dy_mm};
      dtheta += motion[i].dheading_deg;
      centroid = centroid + robots_[i].pos;
    }
    const double n = static_cast<double>(idx.size());
    move_group(group_of, gid, (1.0 / n) * delta, dtheta / n, (1.0 / n) * centroid);
  }

  interact(events, group_of);
  check_undock(events);

  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto& r = robots_[i];
    if (!std::isfinite(r.pos.x) || !std::isfinite(r.pos.y) || !std::isfinite(r.heading_deg) ||
        !std::isfinite(r.pd.value())) {
      throw NumericError("non-finite state for robot " + std::to_string(r.spec.id) +
                         " at tick " + std::to_string(tick_));
    }
    const double tilt = r.ratchet.tilt_deg();
    if (tick_ % 50 == 0 || tilt != r.last_tilt || transitioned[i] ||
        motion[i].dheading_deg != 0.0) {
      event(r.spec.id, log::Kind::pose)
          .add("x", r.pos.x, 4)
          .add("y", r.pos.y, 4)
          .add("heading", r.heading_deg, 3)
          .add("tilt", tilt, 2)
          .add("v", r.ratchet.speed(), 4);
    }
    r.last_tilt = tilt;
  }

  ++tick_;
  return events;
}

void World::interact(std::vector<log::Event>& events, const std::vector<int>& group_of_in) {
  auto group_of = group_of_in;
  const auto& p = scenario_.docking;
  const double cos_align = std::cos(p.align_deg * kDeg);
  const double dt_s = kTickMs * 1e-3;

  std::map<int, int> group_size;
  for (int g : group_of) ++group_size[g];

  // Face forces between robots of different groups.
  std::map<int, Vec2> shift;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    for (std::size_t j = i + 1; j < robots_.size(); ++j) {
      if (group_of[i] == group_of[j]) continue;
      const auto& a = robots_[i];
      const auto& b = robots_[j];
      const double reach = (a.spec.body.edge_mm + b.spec.body.edge_mm) * 0.75 + p.range_mm;
      const Vec2 d = b.pos - a.pos;
      if (dot(d, d) > reach * reach) continue;
      for (int fa = 0; fa < 4; ++fa) {
        const Vec2 na = unit(a.heading_deg + 90.0 * fa);
        for (int fb = 0; fb < 4; ++fb) {
          const Vec2 nb = unit(b.heading_deg + 90.0 * fb);
          if (dot(na, nb) > -cos_align) continue;
          const Vec2 ta{-na.y, na.x};
          const Vec2 rel = face_center(b, fb) - face_center(a, fa);
          const double gap = dot(rel, na);
          const double off = dot(rel, ta);
          const double edge = std::min(a.spec.body.edge_mm, b.spec.body.edge_mm);
          if (gap > p.range_mm || gap < -edge / 2 || std::abs(off) >= edge) continue;
          const auto f = docking_interaction(a.spec.coatings[fa], b.spec.coatings[fb], gap, off, p,
                                             edge);
          const Vec2 force_b = (-f.normal_nN) * na + f.lateral_nN * ta;
          const double mu_a = mobility_mm_s_per_nN(a.spec.body.edge_mm, scenario_.fluid.eta_mpa_s);
          const double mu_b = mobility_mm_s_per_nN(b.spec.body.edge_mm, scenario_.fluid.eta_mpa_s);
          shift[group_of[j]] = shift[group_of[j]] + (mu_b * dt_s / group_size[group_of[j]]) * force_b;
          shift[group_of[i]] =
              shift[group_of[i]] + (-mu_a * dt_s / group_size[group_of[i]]) * force_b;
        }
      }
    }
  }
  for (const auto& [gid, v] : shift) move_group(group_of, gid, v, 0.0, {});

  resolve_collisions(group_of);

  // Dock formation between facing faces in contact.
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    for (std::size_t j = i + 1; j < robots_.size(); ++j) {
      if (group_of[i] == group_of[j]) continue;
      bool docked = false;
      for (int fa = 0; fa < 4 && !docked; ++fa) {
        for (int fb = 0; fb < 4 && !docked; ++fb) {
          auto& a = robots_[i];
          auto& b = robots_[j];
          const Vec2 na = unit(a.heading_deg + 90.0 * fa);
          const Vec2 nb = unit(b.heading_deg + 90.0 * fb);
          if (dot(na, nb) > -cos_align) continue;
          const Vec2 ta{-na.y, na.x};
          const Vec2 rel = face_center(b, fb) - face_center(a, fa);
          const double gap = dot(rel, na);
          const double off = dot(rel, ta);
          const double edge = std::min(a.spec.body.edge_mm, b.spec.body.edge_mm);
          if (gap < -edge / 2 || std::abs(off) >= edge) continue;
          const auto f =
              docking_interaction(a.spec.coatings[fa], b.spec.coatings[fb], gap, off, p, edge);
          if (!f.dock) continue;
          const double eq =
              equilibrium_offset(a.spec.coatings[fa], b.spec.coatings[fb], off, p, edge);
          // Square B's face against A's, then seat it at the equilibrium offset.
          const double nb_deg = b.heading_deg + 90.0 * fb;
          const double na_deg = a.heading_deg + 90.0 * fa;
          const double dtheta = wrap_deg(na_deg + 180.0 - nb_deg);
          move_group(group_of, group_of[j], {}, dtheta, b.pos);
          const Vec2 target = face_center(a, fa) + eq * ta;
          move_group(group_of, group_of[j], target - face_center(b, fb), 0.0, {});
          DockLink link;
          link.robot_a = a.spec.id;
          link.robot_b = b.spec.id;
          link.face_a = fa;
          link.face_b = fb;
          link.lateral_offset_mm = eq;
          link.bond_nN = p.force_scale_nN *
                         segment_overlap(a.spec.coatings[fa], edge, b.spec.coatings[fb], edge, eq, p);
          link.formed_tick = tick_;
          links_.push_back(link);
          const int merged = std::min(group_of[i], group_of[j]);
          const int old_i = group_of[i], old_j = group_of[j];
          for (auto& g : group_of) {
            if (g == old_i || g == old_j) g = merged;
          }
          log::Event e{tick_, a.spec.id, log::Kind::dock, {}};
          e.add("other", std::int64_t{b.spec.id})
              .add("face", std::int64_t{fa})
              .add("other_face", std::int64_t{fb})
              .add("offset", eq, 4)
              .add("bond_nN", link.bond_nN, 2);
          events.push_back(std::move(e));
          docked = true;
        }
      }
    }
  }
  clamp_to_arena(group_of);
}

void World::resolve_collisions(const std::vector<int>& group_of) {
  for (int pass = 0; pass < 4; ++pass) {
    bool any = false;
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      for (std::size_t j = i + 1; j < robots_.size(); ++j) {
        if (group_of[i] == group_of[j]) continue;
        const auto& a = robots_[i];
        const auto& b = robots_[j];
        const double ha = a.spec.body.edge_mm / 2, hb = b.spec.body.edge_mm / 2;
        const Vec2 d = b.pos - a.pos;
        if (dot(d, d) > 2.0 * (ha + hb) * (ha + hb)) continue;
        const Vec2 axes[4] = {unit(a.heading_deg), unit(a.heading_deg + 90), unit(b.heading_deg),
                              unit(b.heading_deg + 90)};
        double best = 1e18;
        Vec2 best_axis;
        bool separated = false;
        for (const auto& u : axes) {
          const double ea = ha * (std::abs(dot(axes[0], u)) + std::abs(dot(axes[1], u)));
          const double eb = hb * (std::abs(dot(axes[2], u)) + std::abs(dot(axes[3], u)));
          const double proj = dot(d, u);
          const double pen = ea + eb - std::abs(proj);
          if (pen <= 1e-12) {
            separated = true;
            break;
          }
          if (pen < best) {
            best = pen;
            best_axis = proj >= 0 ? u : -1.0 * u;
          }
        }
        if (separated) continue;
        any = true;
        move_group(group_of, group_of[j], (best / 2) * best_axis, 0.0, {});
        move_group(group_of, group_of[i], (-best / 2) * best_axis, 0.0, {});
      }
    }
    if (!any) break;
  }
}

void World::clamp_to_arena(const std::vector<int>& group_of) {
  std::map<int, std::array<double, 4>> box;  // min x, min y, max x, max y
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    const auto& r = robots_[i];
    const double h = r.spec.body.edge_mm / 2;
    const double ext = h * (std::abs(std::cos(r.heading_deg * kDeg)) +
                            std::abs(std::sin(r.heading_deg * kDeg)));
    auto [it, fresh] = box.try_emplace(group_of[i], std::array<double, 4>{1e18, 1e18, -1e18, -1e18});
    auto& b = it->second;
    b[0] = std::min(b[0], r.pos.x - ext);
    b[1] = std::min(b[1], r.pos.y - ext);
    b[2] = std::max(b[2], r.pos.x + ext);
    b[3] = std::max(b[3], r.pos.y + ext);
  }
  for (const auto& [gid, b] : box) {
    Vec2 d;
    if (b[0] < 0) d.x = -b[0];
    if (b[2] > scenario_.arena_width_mm) d.x = scenario_.arena_width_mm - b[2];
    if (b[1] < 0) d.y = -b[1];
    if (b[3] > scenario_.arena_height_mm) d.y = scenario_.arena_height_mm - b[3];
    if (d.x != 0 || d.y != 0) move_group(group_of, gid, d, 0.0, {});
  }
}

void World::check_undock(std::vector<log::Event>& events) {
  std::map<int, const Robot*> by_id;
  for (const auto& r : robots_) by_id[r.spec.id] = &r;
  std::erase_if(links_, [&](const DockLink& l) {
    const auto* a = by_id.at(l.robot_a);
    const auto* b = by_id.at(l.robot_b);
    const Vec2 na = unit(a->heading_deg + 90.0 * l.face_a);
    const double sep = (b->ratchet.vx() - a->ratchet.vx()) * na.x +
                       (b->ratchet.vy() - a->ratchet.vy()) * na.y;
    const double mu = mobility_mm_s_per_nN(a->spec.body.edge_mm, scenario_.fluid.eta_mpa_s);
    const double tension = std::max(0.0, sep) / (2 * mu);
    if (tension <= l.bond_nN) return false;
    log::Event e{tick_, l.robot_a, log::Kind::undock, {}};
    e.add("other", std::int64_t{l.robot_b}).add("tension_nN", tension, 2);
    events.push_back(std::move(e));
    return true;
  });
}

Snapshot World::snapshot() const {
  Snapshot s;
  s.tick = tick_;
  s.t_ms = now_ms();
  s.ambient_suns = scenario_.ambient_at(now_ms());
  s.links = links_;
  s.laser = scenario_.laser;
  s.zones = scenario_.zones;
  s.led_busy = !frames_.empty();
  for (const auto& r : robots_) {
    RobotView v;
    v.id = r.spec.id;
    v.position = r.pos;
    v.heading_deg = r.heading_deg;
    v.edge_mm = r.spec.body.edge_mm;
    v.tilt_deg = r.ratchet.tilt_deg();
    v.tilted_actuator = r.ratchet.tilted_face();
    v.vx = r.ratchet.vx();
    v.vy = r.ratchet.vy();
    v.powered = r.powered;
    v.running = r.lablet.state().running;
    v.phase = static_cast<int>(r.lablet.state().phase);
    v.act = r.act;
    v.din = r.din;
    v.pd_volts = r.pd.value();
    for (int a = 0; a < 3; ++a) {
      v.bubble_fill[a] = r.ratchet.faces()[a].fill_fraction(scenario_.bubbles);
      v.bubble_count[a] = r.ratchet.faces()[a].count;
    }
    v.coatings = r.spec.coatings;
    v.has_program = r.lablet.program().has_value();
    s.robots.push_back(v);
  }
  return s;
}

log::EventLog run_scenario(const Scenario& scenario, std::int64_t ticks) {
  World w(scenario);
  log::EventLog out(scenario.name);
  const std::int64_t n = ticks < 0 ? scenario.ticks : ticks;
  for (std::int64_t t = 0; t < n; ++t) out.append(w.step());
  return out;
}

}  // namespace smartlet::world
