// Acceptance report: one PASS/FAIL line per primary criterion. Exit status is
// the number of failing criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smartlet/bubble_dynamics.hpp"
#include "smartlet/errors.hpp"
#include "smartlet/event_log.hpp"
#include "smartlet/lablet_vm.hpp"
#include "smartlet/locomotion.hpp"
#include "smartlet/optical_link.hpp"
#include "smartlet/photosensor.hpp"
#include "smartlet/program_text.hpp"
#include "smartlet/scenario.hpp"
#include "smartlet/summary.hpp"
#include "smartlet/world.hpp"
#include "test_support.hpp"

using namespace smartlet;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SMARTLET_SOURCE_DIR;
int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  std::printf("%s  %-22s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

world::Scenario bundled(const std::string& name) {
  return world::load_scenario((kSource / "scenarios" / (name + ".yaml")).string());
}

struct Pose {
  double x, y, heading;
};

std::map<std::int64_t, std::map<int, Pose>> poses(const std::vector<log::Event>& events) {
  std::map<std::int64_t, std::map<int, Pose>> out;
  for (const auto& e : events) {
    if (e.kind != log::Kind::pose) continue;
    out[e.tick][e.robot] = {e.number("x"), e.number("y"), e.number("heading")};
  }
  return out;
}

std::vector<const log::Event*> of_kind(const std::vector<log::Event>& events, log::Kind k) {
  std::vector<const log::Event*> out;
  for (const auto& e : events) {
    if (e.kind == k) out.push_back(&e);
  }
  return out;
}

void laplace() {
  const double a = bubbles::laplace_pressure_mbar(50.0);
  const double b = bubbles::laplace_pressure_mbar(100.0);
  report(within(a, 29.1, 29.1 * 0.02) && within(b, 14.55, 14.55 * 0.02), "laplace",
         fmt("P(50um)=%.3f P(100um)=%.3f mbar", a, b));
}

void gravity() {
  using F = mech::FillScenario;
  using W = mech::WallModel;
  const std::vector<std::tuple<F, W, double>> cases = {
      {F::water_filled_half_submerged, W::ideal_thin_wall, 4.9},
      {F::water_filled_half_submerged, W::measured_walls, 6.9},
      {F::filled_to_waterline, W::ideal_thin_wall, 0.0},
      {F::filled_to_waterline, W::measured_walls, 3.1},
      {F::gas_filled_half_submerged, W::ideal_thin_wall, -4.9},
      {F::gas_filled_half_submerged, W::measured_walls, -1.0},
  };
  bool ok = true;
  std::string values;
  for (const auto& [f, w, expected] : cases) {
    mech::BodyParams b;
    b.fill = f;
    b.walls = w;
    const double v = mech::net_gravity_uN(b);
    ok = ok && within(v, expected, 0.1);
    values += fmt("%.2f ", v);
  }
  report(ok, "gravity", "uN: " + values);
}

void drag_and_reynolds(const summary::RunSummary& fig2) {
  const double drag = mech::stokes_drag_nN(0.8, 0.5, 1.0);
  const double re = fig2.robots.at(0).reynolds;
  report(within(drag, 7.5, 0.2) && within(re, 0.8, 0.1), "drag_reynolds",
         fmt("drag=%.2f nN Re=%.3f", drag, re));
}

void ratchet(const summary::RunSummary& fig2, const std::vector<log::Event>& events) {
  const auto& p1 = fig2.robots.at(0).phases.at(0);
  // Tilt trace: lift and reseat strictly alternate on one face, at a steady
  // period after the first cycle.
  std::vector<std::int64_t> lifts;
  bool alternating = true;
  bool tilted = false;
  for (const auto* e : of_kind(events, log::Kind::bubble)) {
    if (e->tick < p1.start_tick || e->tick >= p1.end_tick) continue;
    const auto ev = e->get("event");
    if (ev == "lift") {
      alternating = alternating && !tilted;
      tilted = true;
      lifts.push_back(e->tick);
    } else if (ev == "reseat") {
      alternating = alternating && tilted;
      tilted = false;
    }
  }
  std::vector<double> periods;
  for (std::size_t i = 2; i < lifts.size(); ++i) periods.push_back(double(lifts[i] - lifts[i - 1]));
  double spread = 1.0;
  if (!periods.empty()) {
    const auto [lo, hi] = std::minmax_element(periods.begin(), periods.end());
    const double mean = (*lo + *hi) / 2;
    spread = (*hi - *lo) / 2 / mean;
  }
  const bool periodic = alternating && periods.size() >= 10 && spread < 0.1;
  report(within(p1.mean_speed_mm_s, 0.75, 0.075) && within(p1.tilt_hz, 5.0, 0.5) && periodic,
         "ratchet",
         fmt("phase1 mean=%.3f mm/s tilt=%.2f Hz cycles=%zu period spread=%.1f%%",
             p1.mean_speed_mm_s, p1.tilt_hz, lifts.size(), spread * 100));
}

void pd_transients() {
  photo::PhotodiodeModel m;
  const double dt = 1.0;
  std::vector<double> up_t(2000, m.voltage(1.0));
  up_t.resize(12000, m.voltage(6.0));
  std::vector<double> down_t(2000, m.voltage(6.0));
  down_t.resize(20000, m.voltage(1.0));
  const double rise = photo::rise_time_10_90(photo::transient(m, up_t, dt), dt);
  const double fall = photo::fall_time_90_10(photo::transient(m, down_t, dt), dt);
  report(within(rise, 230, 230 * 0.05) && within(fall, 1850, 1850 * 0.05), "pd_transients",
         fmt("rise=%.0f us fall=%.0f us", rise, fall));
}

void optical_pipeline() {
  std::mt19937_64 rng(2024);
  Rng jitter(2025);
  photo::PhotodiodeModel pd;
  const auto comparator = photo::default_comparator(pd);
  int exact = 0, rejected = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    optical::OpticalFrame f;
    f.command = static_cast<std::uint8_t>(vm::Opcode::load);
    f.payload = vm::encode_run_command(test_support::random_program(rng));
    const auto w = optical::jitter_edges(optical::manchester_encode(f, 5.0), 0.15, jitter);
    try {
      const auto got = optical::manchester_decode(
          optical::pd_samples_to_levels(optical::illuminate(w, pd, 1.0, 5.0), comparator));
      if (got == f) ++exact;
    } catch (const Error&) {
    }
    auto bad = f.payload;
    const auto bit = static_cast<std::size_t>(rng() % vm::kRunCommandBits);
    vm::set_bit_at(bad, bit, !vm::bit_at(bad, bit));
    vm::Lablet chip;
    if (chip.apply(f.command, bad) == vm::Lablet::CommandOutcome::rejected) ++rejected;
  }
  report(exact == n && rejected == n, "optical_pipeline",
         fmt("%d/%d frames bit-exact at 5 ms +-15%% jitter, %d/%d bit flips rejected", exact, n,
             rejected, n));
}

// First tick the robot centre sits inside each enabled zone.
std::vector<std::int64_t> zone_entries(const world::Scenario& sc) {
  world::World w(sc);
  std::vector<std::int64_t> entries;
  std::map<std::string, bool> inside;
  for (std::int64_t t = 0; t < sc.ticks; ++t) {
    const auto s = w.snapshot();
    for (const auto& z : s.zones) {
      const bool in = z.enabled && s.t_ms >= z.enabled_at_ms && z.contains(s.robots.at(0).position);
      if (in && !inside[z.id]) entries.push_back(t);
      inside[z.id] = in;
    }
    w.step();
  }
  return entries;
}

void navigation() {
  bool ok = true;
  std::string detail;
  for (const auto& [variant, axes] :
       std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"b", {"-x", "+y", "+x"}}, {"a", {"-x", "+y", "-x"}}}) {
    const auto sc = bundled("fig3e_navigation_" + variant);
    const auto log = world::run_scenario(sc);
    const auto sum = summary::summarize(log.events(), sc.ticks, sc.name);
    const auto& r = sum.robots.at(0);
    std::vector<std::string> got;
    for (const auto& p : r.phases) got.push_back(p.axis);
    bool turns_ok = r.turns.size() == 2;
    for (const auto& t : r.turns) turns_ok = turns_ok && within(std::abs(t.angle_deg), 90, 15);

    // Each transition follows a zone entry by no more than the debounce
    // window plus the sensing tick.
    const auto entries = zone_entries(sc);
    const int window = sc.robots.at(0).program->debounce_ticks + 1;
    std::vector<std::int64_t> transitions;
    for (const auto* e : of_kind(log.events(), log::Kind::phase_transition)) transitions.push_back(e->tick);
    bool at_entries = transitions.size() == entries.size() && !entries.empty();
    for (std::size_t i = 0; at_entries && i < entries.size(); ++i) {
      at_entries = transitions[i] >= entries[i] && transitions[i] - entries[i] <= window;
    }
    const bool pass = got == axes && turns_ok && at_entries;
    ok = ok && pass;
    detail += fmt("%s:", variant.c_str());
    for (const auto& a : got) detail += " " + a;
    for (const auto& t : r.turns) detail += fmt(" turn=%.0f", t.angle_deg);
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      detail += fmt(" t%zu=%lld(entry %lld)", i + 1, static_cast<long long>(transitions[i]),
                    static_cast<long long>(i < entries.size() ? entries[i] : -1));
    }
    detail += "; ";
  }
  report(ok, "navigation", detail);
}

void docking() {
  std::string detail;
  // Mismatch: contact within 0.1 mm, then back beyond 0.25 mm, never linked.
  bool mismatch_ok = false;
  {
    const auto sc = bundled("fig4_docking_mismatch");
    const auto log = world::run_scenario(sc);
    const auto ps = poses(log.events());
    double min_gap = 1e9, final_gap = 0;
    for (const auto& [t, m] : ps) {
      if (!m.count(1) || !m.count(2)) continue;
      const double gap = std::hypot(m.at(1).x - m.at(2).x, m.at(1).y - m.at(2).y) - 1.0;
      min_gap = std::min(min_gap, gap);
      final_gap = gap;
    }
    mismatch_ok = of_kind(log.events(), log::Kind::dock).empty() && min_gap <= 0.1 && final_gap >= 0.25;
    detail += fmt("mismatch min_gap=%.3f final_gap=%.3f docks=%zu; ", min_gap, final_gap,
                  of_kind(log.events(), log::Kind::dock).size());
  }
  // Match: link holds through >= 10 s of joint motion with small pose drift.
  bool match_ok = false;
  {
    const auto sc = bundled("fig4_docking_match");
    const auto log = world::run_scenario(sc);
    const auto docks = of_kind(log.events(), log::Kind::dock);
    const auto undocks = of_kind(log.events(), log::Kind::undock);
    if (docks.size() == 1 && undocks.empty()) {
      const auto t0 = docks[0]->tick;
      const auto ps = poses(log.events());
      std::optional<std::pair<double, double>> ref;
      double drift = 0, travel = 0;
      Pose start{}, last{};
      for (const auto& [t, m] : ps) {
        if (t < t0 || !m.count(1) || !m.count(2)) continue;
        const auto& a = m.at(1);
        const auto& b = m.at(2);
        const double h = a.heading * M_PI / 180;
        const double dx = b.x - a.x, dy = b.y - a.y;
        const std::pair<double, double> rel = {dx * std::cos(h) + dy * std::sin(h),
                                               -dx * std::sin(h) + dy * std::cos(h)};
        if (!ref) {
          ref = rel;
          start = a;
        }
        drift = std::max(drift, std::hypot(rel.first - ref->first, rel.second - ref->second));
        last = a;
      }
      travel = std::hypot(last.x - start.x, last.y - start.y);
      const double held_s = double(sc.ticks - t0) / 1000.0;
      match_ok = held_s >= 10.0 && drift < 0.05 && travel > 1.0;
      detail += fmt("match held=%.1f s travel=%.2f mm drift=%.4f mm; ", held_s, travel, drift);
    } else {
      detail += fmt("match docks=%zu undocks=%zu; ", docks.size(), undocks.size());
    }
  }
  bool stripes_ok = false;
  {
    const auto sc = bundled("fig4_docking_stripes");
    const auto log = world::run_scenario(sc);
    const auto docks = of_kind(log.events(), log::Kind::dock);
    if (!docks.empty()) {
      const double off = std::abs(docks[0]->number("offset"));
      stripes_ok = within(off, 0.5, 0.05);
      detail += fmt("stripes offset=%.3f mm", off);
    } else {
      detail += "stripes no dock";
    }
  }
  report(mismatch_ok && match_ok && stripes_ok, "docking", detail);
}

void determinism() {
  int checked = 0, stable = 0;
  std::string broken;
  for (const auto& entry : fs::directory_iterator(kSource / "scenarios")) {
    if (entry.path().extension() != ".yaml") continue;
    const auto name = entry.path().stem().string();
    const auto golden_path = kSource / "tests" / "golden" / (name + ".log");
    ++checked;
    std::ifstream in(golden_path);
    std::stringstream golden;
    golden << in.rdbuf();
    const auto sc = world::load_scenario(entry.path().string());
    const auto first = world::run_scenario(sc).render(sc.ticks, 12.5);
    const auto second = world::run_scenario(sc).render(sc.ticks, 99.0);
    if (log::normalize(first) == log::normalize(second) && log::verify(first, golden.str()).pass) {
      ++stable;
    } else {
      broken += " " + name;
    }
  }
  report(checked > 0 && stable == checked, "determinism",
         fmt("%d/%d bundled scenarios match their golden logs", stable, checked) + broken);
}

void properties() {
  std::mt19937_64 rng(77);
  const bubbles::BubbleParams bp;

  int volume_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    bubbles::FaceInventory f;
    f.count = 2 + static_cast<int>(rng() % 200);
    f.mean_radius_um = 10.0 + double(rng() % 1400) / 10.0;
    const double before = f.gas_volume_um3();
    bubbles::merge_once(f, bp);
    bubbles::coalesce(f, bp);
    if (std::abs(f.gas_volume_um3() - before) > 1e-9 * before) ++volume_bad;
  }

  int act_bad = 0;
  for (int p = 0; p < 100; ++p) {
    const auto program = test_support::random_program(rng);
    vm::ControllerState s;
    s.running = true;
    for (int t = 0; t < 100; ++t) {
      const auto r = vm::step_controller(s, program, rng() & 1);
      const auto phase = r.state.phase;
      const std::uint8_t mask =
          phase == vm::Phase::halted ? 0 : program.phases[static_cast<std::size_t>(phase) - 1].act_mask;
      if ((r.act_out & ~mask) != 0) ++act_bad;
      s = r.state;
    }
  }

  int asm_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto bits = vm::encode_run_command(test_support::random_program(rng));
    if (vm::assemble(vm::disassemble(bits)) != bits) ++asm_bad;
  }

  int codec_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    optical::OpticalFrame f;
    f.command = static_cast<std::uint8_t>(rng());
    for (std::size_t b = 0; b < vm::kRunCommandBits; ++b) vm::set_bit_at(f.payload, b, rng() & 1);
    try {
      if (optical::manchester_decode(optical::manchester_encode(f, 1.0 + double(rng() % 9))) != f) ++codec_bad;
    } catch (const Error&) {
      ++codec_bad;
    }
  }
  report(volume_bad + act_bad + asm_bad + codec_bad == 0, "property_suite",
         fmt("violations: volume=%d act_mask=%d assemble=%d codec=%d (10^4 cases each)",
             volume_bad, act_bad, asm_bad, codec_bad));
}

}  // namespace

int main() {
  laplace();
  gravity();
  const auto fig2_sc = bundled("fig2_locomotion");
  const auto fig2_log = world::run_scenario(fig2_sc);
  const auto fig2 = summary::summarize(fig2_log.events(), fig2_sc.ticks, fig2_sc.name);
  drag_and_reynolds(fig2);
  ratchet(fig2, fig2_log.events());
  pd_transients();
  optical_pipeline();
  navigation();
  docking();
  determinism();
  properties();
  std::printf("%d criteria failed\n", failures);
  return failures;
}
