#pragma once

// Quasi-static mechanics of one smartlet: static force accounting, the
// tilt/release ratchet cycle, rotation on actuator-face switches, and
// first-order velocity relaxation.
//
// Body frame: face 0 = +x, 1 = +y, 2 = -x, 3 = -y. ACT-0 drives face 0,
// ACT-1 face 3 and ACT-2 face 2; bubbles on a face push the cube away from it.

#include <array>
#include <optional>
#include <string_view>

#include "smartlet/bubble_dynamics.hpp"
#include "smartlet/rng.hpp"

namespace smartlet::mech {

enum class FillScenario { water_filled_half_submerged, filled_to_waterline, gas_filled_half_submerged };
enum class WallModel { ideal_thin_wall, measured_walls };

std::string_view to_string(FillScenario f);
std::string_view to_string(WallModel w);
std::optional<FillScenario> parse_fill(std::string_view s);
std::optional<WallModel> parse_walls(std::string_view s);

struct FluidEnv {
  double rho = 1000.0;        // kg/m^3
  double g = 9.8;             // m/s^2
  double eta_mpa_s = 1.0;
  double film_depth_um = 500.0;
};

struct BodyParams {
  double edge_mm = 1.0;
  double wall_um = 40.0;
  double dry_weight_uN = 3.9;
  FillScenario fill = FillScenario::filled_to_waterline;
  WallModel walls = WallModel::measured_walls;
};

/// Net downward load in uN: dry weight + weight of interior water minus the
/// water displaced by the submerged envelope (open face down, waterline at
/// the film depth).
double net_gravity_uN(const BodyParams& body, const FluidEnv& env = {});

struct TiltDecision {
  bool lift = false;
  double tilt_deg = 0.0;
  double pressure_force_uN = 0.0;
};

/// Lift when the bubble pressure over the wetted strip (one bubble diameter
/// by one edge, times `contact_fraction`) exceeds half the net gravity.
TiltDecision tilt_decision(double face_pressure_mbar, double bubble_radius_um,
                           const BodyParams& body, const FluidEnv& env = {},
                           double contact_fraction = 1.0);

inline double ratchet_velocity(double step_mm, double cycle_hz) { return step_mm * cycle_hz; }

/// 6 pi eta R v in nN (v in mm/s, R in mm).
double stokes_drag_nN(double v_mm_s, double radius_mm, double eta_mpa_s = 1.0);

/// rho v L / eta.
double reynolds(double v_mm_s, double length_mm, const FluidEnv& env = {});

/// m / (6 pi eta R) for a water sphere, with optional added-mass coefficient.
double stokes_decay_s(double radius_mm, const FluidEnv& env = {}, double added_mass = 0.0);

/// First-order relaxation of v toward target over dt.
double relax(double v, double target, double dt_s, double tau_s);

/// Heading change that decays exponentially: omega(t) = (net/tau) e^{-t/tau}.
class RotationImpulse {
 public:
  void start(double net_deg, double tau_ms) {
    remaining_deg_ += net_deg;
    tau_ms_ = tau_ms;
  }
  /// Heading change over the next dt.
  double step(double dt_ms);
  double remaining_deg() const { return remaining_deg_; }
  bool active() const { return std::abs(remaining_deg_) > 1e-9; }

 private:
  double remaining_deg_ = 0.0;
  double tau_ms_ = 5.0;
};

inline constexpr std::array<int, 3> kFaceOfActuator = {0, 3, 2};

/// Outward normal angle of a body face, degrees in the body frame.
inline double face_normal_deg(int face) { return 90.0 * face; }

/// Net heading impulse (degrees) for an actuation switch between faces.
/// Adjacent faces with residual bubbles rotate by `sense_deg` (negative is
/// clockwise); same or opposite faces do not rotate.
double switch_rotation(int prev_face, int new_face, int residual_bubbles, double sense_deg = -5.0);

struct RatchetParams {
  double release_interval_ms = 8.8;
  double tau_v_s = 0.1;
  double tau_rot_ms = 5.0;
  double switch_rotation_deg = -5.0;
  double contact_fraction = 1.0;
  /// Target speed drops to zero when no cycle completes for this long.
  double stall_ms = 500.0;
  /// Target speed drops to zero when no actuator has been driven this long.
  double idle_ms = 20.0;
};

struct RatchetEvents {
  std::optional<int> lifted_face;
  std::optional<int> reseated_face;
  double cycle_ms = 0.0;  ///< duration of the cycle that just completed
  std::array<int, 3> nucleated{};
  std::array<int, 3> released{};
  std::array<bool, 3> coalesced{};
  std::optional<double> rotation_deg;
  std::optional<int> switched_from;
};

struct MotionStep {
  double dx_mm = 0.0;
  double dy_mm = 0.0;
  double dheading_deg = 0.0;
  RatchetEvents events;
};

/// Bubble-driven ratchet of one cube: a face fills until it can lift the
/// opposite edge, stays tilted while rows of bubbles vent through the bottom
/// gap, and reseats once less than a row remains; each completed cycle moves
/// the cube one bubble diameter away from that face.
class Ratchet {
 public:
  Ratchet() = default;
  Ratchet(RatchetParams params, bubbles::BubbleParams bubble_params, BodyParams body,
          FluidEnv env)
      : params_(params), bubble_params_(bubble_params), body_(body), env_(env) {}

  /// One tick. `act` bit i drives actuator i; `heading_deg` orients the body.
  MotionStep step(std::uint8_t act, double now_ms, double dt_ms, double heading_deg, Rng& rng);

  /// Stops all motion and drops bubbles (power loss keeps bubbles; reset
  /// does not).
  void clear_motion();

  const std::array<bubbles::FaceInventory, 3>& faces() const { return faces_; }
  std::optional<int> tilted_face() const { return tilted_; }
  double tilt_deg() const { return tilt_deg_; }
  double vx() const { return vx_; }
  double vy() const { return vy_; }
  double speed() const { return std::hypot(vx_, vy_); }
  const RatchetParams& params() const { return params_; }
  const BodyParams& body() const { return body_; }
  BodyParams& mutable_body() { return body_; }
  int lift_count() const;

 private:
  RatchetParams params_;
  bubbles::BubbleParams bubble_params_;
  BodyParams body_;
  FluidEnv env_;

  std::array<bubbles::FaceInventory, 3> faces_{};
  std::optional<int> tilted_;  // actuator index
  double tilt_deg_ = 0.0;
  double next_release_ms_ = 0.0;
  std::optional<int> current_actuator_;
  double cycle_start_ms_ = 0.0;
  double last_reseat_ms_ = -1e18;
  double last_active_ms_ = -1e18;
  double vx_ = 0.0, vy_ = 0.0;
  double target_vx_ = 0.0, target_vy_ = 0.0;
  RotationImpulse rotation_;
};

}  // namespace smartlet::mech
