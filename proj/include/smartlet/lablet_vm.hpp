#pragma once

// Behavioral model of the lablet CMOS chiplet: the 58-bit run command, the
// three-phase actuation state machine and its 1-bit sensor predicates.
//
// The real bit layout and predicate set of the chiplet are not public. The
// layout used here is a stand-in that covers every behavior the smartlet
// experiments exercise:
//
//   bits  0..41  three PhaseConfig blocks, 14 bits each, phase 1 first:
//                act_mask(3) period_code(4) duty_code(3) timeout_code(4)
//   bits 42..44  sensor_condition
//   bits 45..46  transition_mode
//   bits 47..49  debounce_ticks
//   bits 50..53  reserved (carried through unchanged, zero by default)
//   bits 54..57  parity
//
// Bit 0 is the most significant bit of the rendered 0/1 string. Parity is
// the XOR fold of data bits 0..53: parity[j] is the XOR of every data bit i
// with i % 4 == j.

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace smartlet::vm {

inline constexpr std::size_t kRunCommandBits = 58;
inline constexpr std::size_t kPhaseCount = 3;
inline constexpr std::size_t kActuatorCount = 3;

/// Bit 0 of the run command is stored at bitset position 57 so that
/// std::bitset::to_string() renders MSB first.
using RunCommandBits = std::bitset<kRunCommandBits>;

enum class SensorCondition : std::uint8_t {
  never = 0,
  rising_edge = 1,
  falling_edge = 2,
  level_high_sustained = 3,
  level_low_sustained = 4,
  any_edge = 5,
  always = 6,
  level_high_instant = 7,
};

enum class TransitionMode : std::uint8_t {
  advance_on_sensor = 0,
  advance_on_timeout = 1,
  sensor_or_timeout = 2,
  loop = 3,
};

std::string_view to_string(SensorCondition c);
std::string_view to_string(TransitionMode m);
std::optional<SensorCondition> parse_condition(std::string_view s);
std::optional<TransitionMode> parse_mode(std::string_view s);

struct PhaseConfig {
  std::uint8_t act_mask = 0;      ///< bit i drives ACT-i
  std::uint8_t period_code = 0;   ///< period = 2^code ticks
  std::uint8_t duty_code = 7;     ///< duty = (code + 1) / 8
  std::uint8_t timeout_code = 0;  ///< timeout = 2^code * 100 ticks, 0 = none

  std::uint32_t period_ticks() const { return 1u << period_code; }
  double duty() const { return (duty_code + 1) / 8.0; }
  /// 0 means the phase never times out.
  std::uint32_t timeout_ticks() const {
    return timeout_code == 0 ? 0u : (1u << timeout_code) * 100u;
  }

  friend bool operator==(const PhaseConfig&, const PhaseConfig&) = default;
};

struct LabletProgram {
  std::array<PhaseConfig, kPhaseCount> phases{};
  SensorCondition sensor_condition = SensorCondition::never;
  TransitionMode transition_mode = TransitionMode::advance_on_sensor;
  std::uint8_t debounce_ticks = 0;
  std::uint8_t reserved = 0;
  /// Filled in by encode/decode; equals the XOR fold of the data bits.
  std::uint8_t parity = 0;

  friend bool operator==(const LabletProgram&, const LabletProgram&) = default;
};

/// Throws InvalidParameter when any field exceeds its bit width.
void validate(const LabletProgram& program);

/// Packs a program into its 58-bit form, computing parity.
RunCommandBits encode_run_command(const LabletProgram& program);

/// Unpacks a run command. Throws RejectedProgram on parity mismatch.
LabletProgram decode_run_command(const RunCommandBits& bits);

/// 4-bit XOR fold of the 54 data bits of `bits`.
std::uint8_t parity_fold(const RunCommandBits& bits);

/// Returns `program` with its parity field set to match its fields.
LabletProgram with_parity(LabletProgram program);

/// MSB-first 0/1 rendering and parsing.
std::string to_bit_string(const RunCommandBits& bits);
RunCommandBits parse_bit_string(std::string_view text);

/// Bit i of the run command (i = 0 is the MSB).
inline bool bit_at(const RunCommandBits& bits, std::size_t i) {
  return bits[kRunCommandBits - 1 - i];
}
inline void set_bit_at(RunCommandBits& bits, std::size_t i, bool v) {
  bits[kRunCommandBits - 1 - i] = v;
}

/// Fixed-capacity ring of recent Din samples; index 0 is the newest.
class DinHistory {
 public:
  static constexpr std::size_t kCapacity = 16;

  void push(bool bit) {
    head_ = (head_ + 1) % kCapacity;
    bits_[head_] = bit;
    if (size_ < kCapacity) ++size_;
  }
  std::size_t size() const { return size_; }
  /// `age` 0 is the most recent sample. Samples older than the recorded
  /// history read as 0 (the comparator idles low).
  bool at(std::size_t age) const {
    if (age >= size_) return false;
    return bits_[(head_ + kCapacity - age) % kCapacity];
  }
  void clear() { *this = DinHistory{}; }

  friend bool operator==(const DinHistory&, const DinHistory&) = default;

 private:
  std::array<bool, kCapacity> bits_{};
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// Pure predicate over the Din history. `debounce` is the program's
/// debounce_ticks; edge conditions require the new level to have held for
/// debounce + 1 samples, level conditions for max(debounce, 1) samples.
bool evaluate_condition(SensorCondition condition, const DinHistory& history,
                        std::uint8_t debounce);

/// Minimum history length a condition needs to be decidable.
std::size_t required_history(SensorCondition condition, std::uint8_t debounce);

enum class Phase : std::uint8_t { p1 = 1, p2 = 2, p3 = 3, halted = 4 };

struct ControllerState {
  Phase phase = Phase::p1;
  /// False until a RUN command arrives; outputs stay low while false.
  bool running = false;
  std::uint32_t ticks_in_phase = 0;
  DinHistory din_history;
  std::uint8_t act_out = 0;
  bool dout = false;

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

/// High ticks per pulse period: round(period * duty), at least one.
std::uint32_t pulse_high_ticks(std::uint32_t period_ticks, double duty);

/// ACT bits for tick `tick_in_phase` of a phase with the given schedule.
std::uint8_t pulse_schedule(std::uint8_t act_mask, std::uint32_t period_ticks,
                            double duty, std::uint32_t tick_in_phase);

struct StepResult {
  ControllerState state;
  std::uint8_t act_out = 0;
  bool dout = false;
  /// Set when this tick changed phase (including to halted).
  std::optional<Phase> transitioned_from;
};

/// Advances the controller by one tick (1 ms of simulated time).
StepResult step_controller(ControllerState state, const LabletProgram& program,
                           bool din);

/// Commands carried in the 8-bit field of an optical frame.
enum class Opcode : std::uint8_t { load = 0x01, run = 0x02, halt = 0x03, reset = 0x04 };

std::string_view to_string(Opcode op);
std::optional<Opcode> parse_opcode(std::string_view s);

/// The chiplet as the world sees it: a nonvolatile program latch plus the
/// volatile controller state.
class Lablet {
 public:
  enum class CommandOutcome { applied, rejected, ignored };

  Lablet() = default;
  explicit Lablet(LabletProgram program, bool start_running = false);

  /// Applies a received frame. LOAD with bad parity keeps the prior program.
  CommandOutcome apply(std::uint8_t command, const RunCommandBits& payload);

  StepResult step(bool din);

  /// Supply collapse: the controller restarts at Phase 1 awaiting RUN.
  void power_loss();

  const std::optional<LabletProgram>& program() const { return program_; }
  const ControllerState& state() const { return state_; }
  ControllerState& mutable_state() { return state_; }

 private:
  std::optional<LabletProgram> program_;
  ControllerState state_;
};

}  // namespace smartlet::vm
