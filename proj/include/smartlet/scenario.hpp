#pragma once

// World scenario description and its YAML file format (scenario_version 1).
// See docs/scenario_format.md for the schema.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smartlet/bubble_dynamics.hpp"
#include "smartlet/lablet_vm.hpp"
#include "smartlet/locomotion.hpp"
#include "smartlet/optical_link.hpp"

namespace smartlet::world {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class Coat : std::uint8_t { philic, phobic };

/// Coating of one lateral face, split into two halves along the face
/// tangent t = (-n_y, n_x): `left` covers s < 0, `right` covers s > 0.
struct FaceCoating {
  Coat left = Coat::philic;
  Coat right = Coat::philic;
  bool striped() const { return left != right; }
  friend bool operator==(const FaceCoating&, const FaceCoating&) = default;
};

std::string to_string(const FaceCoating& c);

struct LightZone {
  std::string id;
  enum class Shape { disc, rect } shape = Shape::disc;
  Vec2 center;            ///< disc
  double radius_mm = 1.0; ///< disc
  Vec2 min, max;          ///< rect
  double intensity_suns = 5.0;
  double enabled_at_ms = 0.0;
  bool enabled = true;    ///< toggled interactively

  bool contains(Vec2 p) const;
  bool active(double now_ms) const { return enabled && now_ms >= enabled_at_ms; }
};

struct Laser {
  Vec2 position;
  double radius_mm = 0.75;
  double intensity_suns = 5.0;
  double wavelength_nm = 635.0;
  bool on = false;
};

struct LedConfig {
  double half_bit_ms = 5.0;
  double intensity_suns = 5.0;
  double jitter = 0.0;  ///< edge jitter as a fraction of the half-bit
};

struct LedCommand {
  double at_ms = 0.0;
  optical::OpticalFrame frame;
};

struct AmbientStep {
  double at_ms = 0.0;
  double suns = 1.0;
};

/// Pairwise face interaction. Segment coefficients weight overlapping coat
/// lengths (positive attracts); the force falls linearly to zero at
/// `range_mm` of gap.
struct DockingParams {
  double range_mm = 0.3;
  double force_scale_nN = 100.0;
  double philic_philic = 1.0;
  double mixed = -0.05;
  double phobic_phobic = 0.1;
  double contact_mm = 0.02;
  double align_deg = 15.0;
};

struct RobotSpec {
  int id = 0;
  Vec2 position;
  double heading_deg = 0.0;
  mech::BodyParams body;
  std::array<FaceCoating, 4> coatings{};
  std::optional<vm::LabletProgram> program;
  bool autostart = false;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  double arena_width_mm = 70.0;
  double arena_height_mm = 70.0;
  mech::FluidEnv fluid;
  double ambient_suns = 1.0;
  std::vector<AmbientStep> ambient_schedule;
  double power_threshold_suns = 0.5;
  std::vector<LightZone> zones;
  Laser laser;
  LedConfig led;
  std::vector<LedCommand> led_script;
  std::vector<RobotSpec> robots;
  mech::RatchetParams ratchet;
  bubbles::BubbleParams bubbles;
  DockingParams docking;

  double ambient_at(double now_ms) const;
};

/// Parses scenario YAML. Throws ParseError with 1-based line and column.
Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::string& path);

/// Canonical YAML rendering (used by session recordings); parses back to an
/// equivalent scenario.
std::string to_yaml(const Scenario& scenario);

/// Throws InvalidParameter if geometry leaves the arena or values are
/// negative.
void validate(const Scenario& scenario);

}  // namespace smartlet::world
