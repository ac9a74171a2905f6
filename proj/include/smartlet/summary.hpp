#pragma once

// Run summary recomputed from event records alone.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smartlet/event_log.hpp"

namespace smartlet::summary {

struct PhaseStat {
  int phase = 1;
  std::int64_t start_tick = 0;
  std::int64_t end_tick = 0;
  double path_mm = 0.0;
  double mean_speed_mm_s = 0.0;
  /// Net motion direction after the first 500 ticks of the phase.
  std::optional<double> direction_deg;
  /// Net displacement rate over the same settled window.
  double steady_speed_mm_s = 0.0;
  std::string axis;  ///< nearest of +x, +y, -x, -y; empty when stationary
  int lifts = 0;
  double tilt_hz = 0.0;  ///< from completed cycle durations
};

struct Turn {
  std::int64_t tick = 0;
  std::string from_axis;
  std::string to_axis;
  double angle_deg = 0.0;  ///< signed, counterclockwise positive
};

struct DockRecord {
  std::int64_t tick = 0;
  int other = 0;
  double offset_mm = 0.0;
  bool formed = true;
};

struct RobotSummary {
  int id = 0;
  std::vector<PhaseStat> phases;
  std::vector<Turn> turns;
  std::vector<DockRecord> docks;
  double mean_speed_mm_s = 0.0;  ///< over all phase time
  double reynolds = 0.0;  ///< phase 1 steady speed, 1 mm length, water
  int frames_received = 0;
};

struct RunSummary {
  std::string scenario;
  std::int64_t ticks = 0;
  double wall_ms = 0.0;
  std::vector<RobotSummary> robots;
};

/// Ticks of the first phase reached after actuation starts are ignored when
/// estimating direction.
inline constexpr std::int64_t kDirectionSettleTicks = 500;

RunSummary summarize(const std::vector<log::Event>& events, std::int64_t ticks,
                     const std::string& scenario = {}, double wall_ms = 0.0);

std::string axis_label(double direction_deg);

/// Pretty-printed JSON.
std::string to_json(const RunSummary& s);

}  // namespace smartlet::summary
