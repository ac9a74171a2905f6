#include "smartlet/locomotion.hpp"

#include <cmath>

namespace smartlet::mech {

namespace {
constexpr double kDeg = M_PI / 180.0;
}

std::string_view to_string(FillScenario f) {
  switch (f) {
    case FillScenario::water_filled_half_submerged: return "water_filled_half_submerged";
    case FillScenario::filled_to_waterline: return "filled_to_waterline";
    case FillScenario::gas_filled_half_submerged: return "gas_filled_half_submerged";
  }
  return "?";
}

std::string_view to_string(WallModel w) {
  return w == WallModel::ideal_thin_wall ? "ideal_thin_wall" : "measured_walls";
}

std::optional<FillScenario> parse_fill(std::string_view s) {
  for (auto f : {FillScenario::water_filled_half_submerged, FillScenario::filled_to_waterline,
                 FillScenario::gas_filled_half_submerged}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::optional<WallModel> parse_walls(std::string_view s) {
  for (auto w : {WallModel::ideal_thin_wall, WallModel::measured_walls}) {
    if (to_string(w) == s) return w;
  }
  return std::nullopt;
}

double net_gravity_uN(const BodyParams& body, const FluidEnv& env) {
  const bool measured = body.walls == WallModel::measured_walls;
  const double L = body.edge_mm * 1e-3;
  const double w = measured ? body.wall_um * 1e-6 : 0.0;
  const double dry = measured ? body.dry_weight_uN * 1e-6 : 0.0;
  const double waterline = std::min(env.film_depth_um * 1e-6, L);
  // Open face down: the cavity spans the full height minus the top wall.
  const double inner = L - 2 * w;
  const double cavity_height = L - w;
  const double cavity_below = inner * inner * std::min(waterline, cavity_height);
  const double cavity_total = inner * inner * cavity_height;
  const double envelope_submerged = L * L * waterline;

  double water_inside = 0.0;
  switch (body.fill) {
    case FillScenario::water_filled_half_submerged: water_inside = cavity_total; break;
    case FillScenario::filled_to_waterline: water_inside = cavity_below; break;
    case FillScenario::gas_filled_half_submerged: water_inside = 0.0; break;
  }
  const double newtons = dry + env.rho * env.g * (water_inside - envelope_submerged);
  return newtons * 1e6;
}

TiltDecision tilt_decision(double face_pressure_mbar, double bubble_radius_um,
                           const BodyParams& body, const FluidEnv& env, double contact_fraction) {
  TiltDecision d;
  if (!(face_pressure_mbar > 0) || !(bubble_radius_um > 0)) return d;
  const double strip_m2 = 2 * bubble_radius_um * 1e-6 * body.edge_mm * 1e-3;
  d.pressure_force_uN = face_pressure_mbar * 100.0 * strip_m2 * contact_fraction * 1e6;
  d.lift = d.pressure_force_uN > 0.5 * net_gravity_uN(body, env);
  if (d.lift) {
    const double s = std::min(1.0, 2 * bubble_radius_um * 1e-3 / body.edge_mm);
    d.tilt_deg = std::asin(s) / kDeg;
  }
  return d;
}

double stokes_drag_nN(double v_mm_s, double radius_mm, double eta_mpa_s) {
  return 6 * M_PI * (eta_mpa_s * 1e-3) * (radius_mm * 1e-3) * (v_mm_s * 1e-3) * 1e9;
}

double reynolds(double v_mm_s, double length_mm, const FluidEnv& env) {
  return env.rho * (v_mm_s * 1e-3) * (length_mm * 1e-3) / (env.eta_mpa_s * 1e-3);
}

double stokes_decay_s(double radius_mm, const FluidEnv& env, double added_mass) {
  const double r = radius_mm * 1e-3;
  const double m = env.rho * 4.0 / 3.0 * M_PI * r * r * r * (1.0 + added_mass);
  return m / (6 * M_PI * env.eta_mpa_s * 1e-3 * r);
}

double relax(double v, double target, double dt_s, double tau_s) {
  return target + (v - target) * std::exp(-dt_s / tau_s);
}

double RotationImpulse::step(double dt_ms) {
  const double d = remaining_deg_ * (1.0 - std::exp(-dt_ms / tau_ms_));
  remaining_deg_ -= d;
  if (std::abs(remaining_deg_) < 1e-9) remaining_deg_ = 0.0;
  return d;
}

double switch_rotation(int prev_face, int new_face, int residual_bubbles, double sense_deg) {
  const int diff = ((new_face - prev_face) % 4 + 4) % 4;
  const bool adjacent = diff == 1 || diff == 3;
  return adjacent && residual_bubbles > 0 ? sense_deg : 0.0;
}

int Ratchet::lift_count() const {
  const int rows = bubble_params_.rows(bubble_params_.r_grown_um);
  return rows * rows;
}

void Ratchet::clear_motion() {
  vx_ = vy_ = target_vx_ = target_vy_ = 0.0;
  tilted_.reset();
  tilt_deg_ = 0.0;
  current_actuator_.reset();
}

MotionStep Ratchet::step(std::uint8_t act, double now_ms, double dt_ms, double heading_deg,
                         Rng& rng) {
  MotionStep out;
  auto& ev = out.events;

  // Face switch: the lowest active actuator drives the cycle.
  std::optional<int> active;
  for (int i = 0; i < 3; ++i) {
    if (act & (1u << i)) {
      active = i;
      break;
    }
  }
  if (active && active != current_actuator_) {
    if (current_actuator_) {
      const int prev = *current_actuator_;
      auto& residual = faces_[prev];
      const double rot = switch_rotation(kFaceOfActuator[prev], kFaceOfActuator[*active],
                                         residual.count, params_.switch_rotation_deg);
      ev.switched_from = prev;
      if (rot != 0.0) {
        rotation_.start(rot, params_.tau_rot_ms);
        ev.rotation_deg = rot;
        // Displaced residual bubbles detach.
        ev.released[prev] += residual.count;
        residual = bubbles::FaceInventory{};
      }
      if (tilted_ == prev) {
        tilted_.reset();
        tilt_deg_ = 0.0;
      }
      target_vx_ = target_vy_ = 0.0;
    }
    current_actuator_ = active;
    cycle_start_ms_ = now_ms;
  }

  for (int i = 0; i < 3; ++i) {
    const bool on = act & (1u << i);
    auto& face = faces_[i];
    if (tilted_ == i) {
      // Gap open: fresh gas vents directly, rows leave at a fixed pace.
      if (now_ms >= next_release_ms_) {
        ev.released[i] += bubbles::release(face, true, bubble_params_).released;
        next_release_ms_ = now_ms + params_.release_interval_ms;
      }
      if (face.count < bubble_params_.rows(face.mean_radius_um)) {
        tilted_.reset();
        tilt_deg_ = 0.0;
        face.anchored = face.count > 0;
        ev.reseated_face = i;
        ev.cycle_ms = now_ms - cycle_start_ms_;
        cycle_start_ms_ = now_ms;
        last_reseat_ms_ = now_ms;
        const double step_mm = 2 * bubble_params_.r_grown_um * 1e-3;
        const double v = step_mm / (ev.cycle_ms * 1e-3);
        const double dir = (heading_deg + face_normal_deg(kFaceOfActuator[i]) + 180.0) * kDeg;
        target_vx_ = v * std::cos(dir);
        target_vy_ = v * std::sin(dir);
      }
      continue;
    }
    ev.nucleated[i] = bubbles::nucleate(face, on, dt_ms, bubble_params_, rng);
    ev.coalesced[i] = bubbles::coalesce(face, bubble_params_);
    if (!on && face.count > 0) face.anchored = true;
  }

  if (!tilted_ && active) {
    auto& face = faces_[*active];
    if (face.count >= lift_count()) {
      const auto d = tilt_decision(face.pressure_mbar(bubble_params_), face.mean_radius_um,
                                   body_, env_, params_.contact_fraction);
      if (d.lift) {
        tilted_ = *active;
        tilt_deg_ = d.tilt_deg;
        next_release_ms_ = now_ms + params_.release_interval_ms;
        ev.lifted_face = *active;
      }
    }
  }

  if (active) last_active_ms_ = now_ms;
  if (now_ms - last_reseat_ms_ > params_.stall_ms || now_ms - last_active_ms_ > params_.idle_ms) {
    target_vx_ = target_vy_ = 0.0;
  }

  const double dt_s = dt_ms * 1e-3;
  const double vx0 = vx_, vy0 = vy_;
  vx_ = relax(vx_, target_vx_, dt_s, params_.tau_v_s);
  vy_ = relax(vy_, target_vy_, dt_s, params_.tau_v_s);
  out.dx_mm = 0.5 * (vx0 + vx_) * dt_s;
  out.dy_mm = 0.5 * (vy0 + vy_) * dt_s;
  out.dheading_deg = rotation_.step(dt_ms);
  return out;
}

}  // namespace smartlet::mech
