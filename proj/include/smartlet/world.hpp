#pragma once

// Fixed-step arena simulation. One tick is 1 ms. Per tick, in order: power
// gate, light fields and PD transient (sub-stepped) into the comparator and
// frame receiver, controller step, bubble ratchet, group motion with face
// interactions, docking and collision resolution, then event records.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smartlet/event_log.hpp"
#include "smartlet/lablet_vm.hpp"
#include "smartlet/locomotion.hpp"
#include "smartlet/optical_link.hpp"
#include "smartlet/photosensor.hpp"
#include "smartlet/rng.hpp"
#include "smartlet/scenario.hpp"

namespace smartlet::world {

inline constexpr double kTickMs = 1.0;
inline constexpr int kPdSubsteps = 20;
inline constexpr std::uint64_t kLedJitterStream = 1000000;

/// Mobility of a 1 mm cube approximated as a sphere of radius edge/2:
/// velocity (mm/s) per nN of applied force.
double mobility_mm_s_per_nN(double edge_mm, double eta_mpa_s = 1.0);

/// Weighted overlap of two facing faces whose centers are offset by
/// `offset_mm` along A's tangent (B's tangent runs opposite). Normalized so
/// two aligned full philic faces give `philic_philic`.
double segment_overlap(const FaceCoating& a, double edge_a_mm, const FaceCoating& b,
                       double edge_b_mm, double offset_mm, const DockingParams& p);

struct FaceForce {
  double normal_nN = 0.0;   ///< + attracts
  double lateral_nN = 0.0;  ///< on B along A's tangent
  bool dock = false;
};

/// Force between two facing faces at `gap_mm` (clamped at 0) and lateral
/// offset; `dock` is set inside the contact threshold when the net segment
/// interaction attracts.
FaceForce docking_interaction(const FaceCoating& a, const FaceCoating& b, double gap_mm,
                              double offset_mm, const DockingParams& p, double edge_mm = 1.0);

/// Offset in [-edge/2, edge/2] reached by climbing the overlap score from
/// `start_mm`.
double equilibrium_offset(const FaceCoating& a, const FaceCoating& b, double start_mm,
                          const DockingParams& p, double edge_mm = 1.0);

struct DockLink {
  int robot_a = 0;
  int robot_b = 0;
  int face_a = 0;
  int face_b = 0;
  double lateral_offset_mm = 0.0;
  double bond_nN = 0.0;
  std::int64_t formed_tick = 0;
};

struct MoveLaser {
  Vec2 position;
  bool on = true;
};
struct ToggleZone {
  std::string id;
};
struct EmitFrame {
  optical::OpticalFrame frame;
};
struct PlaceRobot {
  RobotSpec robot;
};
/// Restores the scenario as loaded (laser, zones, robots) with a new seed.
struct ResetWorld {
  std::uint64_t seed = 0;
};
using Command = std::variant<MoveLaser, ToggleZone, EmitFrame, PlaceRobot, ResetWorld>;

struct RobotView {
  int id = 0;
  Vec2 position;
  double heading_deg = 0.0;
  double edge_mm = 1.0;
  double tilt_deg = 0.0;
  std::optional<int> tilted_actuator;
  double vx = 0.0, vy = 0.0;
  bool powered = false;
  bool running = false;
  int phase = 1;
  std::uint8_t act = 0;
  bool din = false;
  double pd_volts = 0.0;
  std::array<double, 3> bubble_fill{};
  std::array<int, 3> bubble_count{};
  std::array<FaceCoating, 4> coatings{};
  bool has_program = false;
};

struct Snapshot {
  std::int64_t tick = 0;
  double t_ms = 0.0;
  double ambient_suns = 0.0;
  std::vector<RobotView> robots;
  std::vector<DockLink> links;
  Laser laser;
  std::vector<LightZone> zones;
  bool led_busy = false;
};

class World {
 public:
  explicit World(Scenario scenario);

  /// Advances one tick and returns the records it produced.
  std::vector<log::Event> step();

  /// Applies an external command; call only between ticks. Throws
  /// InvalidParameter for unknown zones or out-of-arena placements.
  void apply(const Command& command);

  std::int64_t tick() const { return tick_; }
  double now_ms() const { return static_cast<double>(tick_) * kTickMs; }
  const Scenario& scenario() const { return scenario_; }
  const std::vector<DockLink>& links() const { return links_; }
  Snapshot snapshot() const;

  /// Suns on a PD whose normal has elevation `normal_elevation_deg` above the
  /// substrate (90 = facing up). Sources shine straight down.
  double light_intensity_at(Vec2 position, double normal_elevation_deg = 90.0) const;
  bool powered_at(double now_ms) const;

  std::size_t robot_count() const { return robots_.size(); }

 private:
  struct Robot {
    RobotSpec spec;
    Vec2 pos;
    double heading_deg = 0.0;
    vm::Lablet lablet;
    mech::Ratchet ratchet;
    Rng rng;
    photo::PdTransient pd{photo::PhotodiodeModel{}};
    bool comparator = false;
    optical::FrameReceiver rx;
    bool powered = false;
    bool din = false;
    std::uint8_t act = 0;
    double last_tilt = 0.0;
  };
  struct ScheduledFrame {
    double start_ms = 0.0;
    optical::Waveform waveform;
  };

  void build(std::uint64_t seed);
  Robot make_robot(const RobotSpec& spec) const;
  void schedule_frame(const optical::OpticalFrame& frame, double at_ms);
  int led_level(double t_ms) const;
  std::vector<int> groups() const;
  void move_group(const std::vector<int>& group, int gid, Vec2 delta, double dtheta_deg,
                  Vec2 pivot);
  void interact(std::vector<log::Event>& events, const std::vector<int>& group_of);
  void resolve_collisions(const std::vector<int>& group_of);
  void clamp_to_arena(const std::vector<int>& group_of);
  void check_undock(std::vector<log::Event>& events);
  Vec2 face_center(const Robot& r, int face) const;

  Scenario original_;
  Scenario scenario_;
  std::uint64_t seed_ = 0;
  std::int64_t tick_ = 0;
  std::vector<Robot> robots_;
  std::vector<DockLink> links_;
  std::vector<ScheduledFrame> frames_;
  std::size_t next_script_ = 0;
  std::uint64_t frame_index_ = 0;
  photo::PhotodiodeModel pd_model_;
  photo::Comparator comparator_;
};

/// Runs `ticks` ticks (the scenario's own count if negative), appending every
/// record. Throws NumericError if any state turns non-finite.
log::EventLog run_scenario(const Scenario& scenario, std::int64_t ticks = -1);

}  // namespace smartlet::world
