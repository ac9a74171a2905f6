#include "smartlet/lablet_vm.hpp"

#include <algorithm>
#include <cmath>

#include "smartlet/errors.hpp"

namespace smartlet::vm {

namespace {

constexpr std::size_t kPhaseBits = 14;
constexpr std::size_t kDataBits = 54;
constexpr std::size_t kConditionOffset = 42;
constexpr std::size_t kModeOffset = 45;
constexpr std::size_t kDebounceOffset = 47;
constexpr std::size_t kReservedOffset = 50;
constexpr std::size_t kParityOffset = 54;

void put_field(RunCommandBits& bits, std::size_t offset, std::size_t width,
               unsigned value) {
  for (std::size_t i = 0; i < width; ++i) {
    set_bit_at(bits, offset + i, (value >> (width - 1 - i)) & 1u);
  }
}

unsigned get_field(const RunCommandBits& bits, std::size_t offset, std::size_t width) {
  unsigned v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    v = (v << 1) | (bit_at(bits, offset + i) ? 1u : 0u);
  }
  return v;
}

void check_width(const char* name, unsigned value, unsigned width) {
  if (value >= (1u << width)) {
    throw InvalidParameter(std::string(name) + " = " + std::to_string(value) +
                           " does not fit in " + std::to_string(width) + " bits");
  }
}

bool run_of(const DinHistory& h, std::size_t from, std::size_t count, bool level) {
  for (std::size_t i = from; i < from + count; ++i) {
    if (h.at(i) != level) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(SensorCondition c) {
  switch (c) {
    case SensorCondition::never: return "never";
    case SensorCondition::rising_edge: return "rising_edge";
    case SensorCondition::falling_edge: return "falling_edge";
    case SensorCondition::level_high_sustained: return "level_high_sustained";
    case SensorCondition::level_low_sustained: return "level_low_sustained";
    case SensorCondition::any_edge: return "any_edge";
    case SensorCondition::always: return "always";
    case SensorCondition::level_high_instant: return "level_high_instant";
  }
  return "?";
}

std::string_view to_string(TransitionMode m) {
  switch (m) {
    case TransitionMode::advance_on_sensor: return "advance_on_sensor";
    case TransitionMode::advance_on_timeout: return "advance_on_timeout";
    case TransitionMode::sensor_or_timeout: return "sensor_or_timeout";
    case TransitionMode::loop: return "loop";
  }
  return "?";
}

std::optional<SensorCondition> parse_condition(std::string_view s) {
  for (unsigned i = 0; i < 8; ++i) {
    auto c = static_cast<SensorCondition>(i);
    if (to_string(c) == s || std::to_string(i) == s) return c;
  }
  return std::nullopt;
}

std::optional<TransitionMode> parse_mode(std::string_view s) {
  for (unsigned i = 0; i < 4; ++i) {
    auto m = static_cast<TransitionMode>(i);
    if (to_string(m) == s || std::to_string(i) == s) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::load: return "LOAD";
    case Opcode::run: return "RUN";
    case Opcode::halt: return "HALT";
    case Opcode::reset: return "RESET";
  }
  return "?";
}

std::optional<Opcode> parse_opcode(std::string_view s) {
  for (auto op : {Opcode::load, Opcode::run, Opcode::halt, Opcode::reset}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

void validate(const LabletProgram& p) {
  for (const auto& ph : p.phases) {
    check_width("act_mask", ph.act_mask, 3);
    check_width("period_code", ph.period_code, 4);
    check_width("duty_code", ph.duty_code, 3);
    check_width("timeout_code", ph.timeout_code, 4);
  }
  check_width("sensor_condition", static_cast<unsigned>(p.sensor_condition), 3);
  check_width("transition_mode", static_cast<unsigned>(p.transition_mode), 2);
  check_width("debounce_ticks", p.debounce_ticks, 3);
  check_width("reserved", p.reserved, 4);
}

std::uint8_t parity_fold(const RunCommandBits& bits) {
  std::uint8_t parity = 0;
  for (std::size_t i = 0; i < kDataBits; ++i) {
    if (bit_at(bits, i)) parity ^= static_cast<std::uint8_t>(1u << (3 - i % 4));
  }
  return parity;
}

RunCommandBits encode_run_command(const LabletProgram& p) {
  validate(p);
  RunCommandBits bits;
  for (std::size_t k = 0; k < kPhaseCount; ++k) {
    const auto& ph = p.phases[k];
    const std::size_t base = k * kPhaseBits;
    put_field(bits, base + 0, 3, ph.act_mask);
    put_field(bits, base + 3, 4, ph.period_code);
    put_field(bits, base + 7, 3, ph.duty_code);
    put_field(bits, base + 10, 4, ph.timeout_code);
  }
  put_field(bits, kConditionOffset, 3, static_cast<unsigned>(p.sensor_condition));
  put_field(bits, kModeOffset, 2, static_cast<unsigned>(p.transition_mode));
  put_field(bits, kDebounceOffset, 3, p.debounce_ticks);
  put_field(bits, kReservedOffset, 4, p.reserved);
  put_field(bits, kParityOffset, 4, parity_fold(bits));
  return bits;
}

LabletProgram decode_run_command(const RunCommandBits& bits) {
  const auto stored = static_cast<std::uint8_t>(get_field(bits, kParityOffset, 4));
  const auto computed = parity_fold(bits);
  if (stored != computed) {
    throw RejectedProgram("run command parity mismatch: stored " +
                          std::to_string(stored) + ", computed " +
                          std::to_string(computed));
  }
  LabletProgram p;
  for (std::size_t k = 0; k < kPhaseCount; ++k) {
    const std::size_t base = k * kPhaseBits;
    auto& ph = p.phases[k];
    ph.act_mask = static_cast<std::uint8_t>(get_field(bits, base + 0, 3));
    ph.period_code = static_cast<std::uint8_t>(get_field(bits, base + 3, 4));
    ph.duty_code = static_cast<std::uint8_t>(get_field(bits, base + 7, 3));
    ph.timeout_code = static_cast<std::uint8_t>(get_field(bits, base + 10, 4));
  }
  p.sensor_condition = static_cast<SensorCondition>(get_field(bits, kConditionOffset, 3));
  p.transition_mode = static_cast<TransitionMode>(get_field(bits, kModeOffset, 2));
  p.debounce_ticks = static_cast<std::uint8_t>(get_field(bits, kDebounceOffset, 3));
  p.reserved = static_cast<std::uint8_t>(get_field(bits, kReservedOffset, 4));
  p.parity = stored;
  return p;
}

LabletProgram with_parity(LabletProgram program) {
  program.parity = 0;
  program.parity = parity_fold(encode_run_command(program));
  return program;
}

std::string to_bit_string(const RunCommandBits& bits) { return bits.to_string(); }

RunCommandBits parse_bit_string(std::string_view text) {
  if (text.size() != kRunCommandBits) {
    throw InvalidParameter("run command must be exactly 58 bits, got " +
                           std::to_string(text.size()));
  }
  RunCommandBits bits;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw InvalidParameter("run command contains non-binary character at position " +
                             std::to_string(i));
    }
    set_bit_at(bits, i, text[i] == '1');
  }
  return bits;
}

std::size_t required_history(SensorCondition c, std::uint8_t debounce) {
  switch (c) {
    case SensorCondition::never:
    case SensorCondition::always: return 0;
    case SensorCondition::level_high_instant: return 1;
    case SensorCondition::level_high_sustained:
    case SensorCondition::level_low_sustained: return std::max<std::size_t>(debounce, 1);
    case SensorCondition::rising_edge:
    case SensorCondition::falling_edge:
    case SensorCondition::any_edge: return std::size_t{debounce} + 2;
  }
  return 0;
}

bool evaluate_condition(SensorCondition c, const DinHistory& h, std::uint8_t debounce) {
  const std::size_t hold = std::size_t{debounce} + 1;
  const std::size_t level_window = std::max<std::size_t>(debounce, 1);
  switch (c) {
    case SensorCondition::never: return false;
    case SensorCondition::always: return true;
    case SensorCondition::level_high_instant: return h.at(0);
    case SensorCondition::level_high_sustained: return run_of(h, 0, level_window, true);
    case SensorCondition::level_low_sustained: return run_of(h, 0, level_window, false);
    case SensorCondition::rising_edge:
      return run_of(h, 0, hold, true) && !h.at(hold);
    case SensorCondition::falling_edge:
      return run_of(h, 0, hold, false) && h.at(hold);
    case SensorCondition::any_edge:
      return evaluate_condition(SensorCondition::rising_edge, h, debounce) ||
             evaluate_condition(SensorCondition::falling_edge, h, debounce);
  }
  return false;
}

std::uint32_t pulse_high_ticks(std::uint32_t period_ticks, double duty) {
  if (period_ticks == 0) return 0;
  const auto high = static_cast<std::uint32_t>(std::lround(period_ticks * duty));
  return std::clamp<std::uint32_t>(high, 1, period_ticks);
}

std::uint8_t pulse_schedule(std::uint8_t act_mask, std::uint32_t period_ticks,
                            double duty, std::uint32_t tick_in_phase) {
  if (period_ticks == 0) return 0;
  return (tick_in_phase % period_ticks) < pulse_high_ticks(period_ticks, duty) ? act_mask
                                                                              : 0;
}

StepResult step_controller(ControllerState state, const LabletProgram& program,
                           bool din) {
  StepResult r;
  state.din_history.push(din);
  state.dout = false;

  if (!state.running || state.phase == Phase::halted) {
    state.act_out = 0;
    r.state = state;
    return r;
  }

  const auto& cfg = program.phases[static_cast<std::size_t>(state.phase) - 1];
  const bool sensor =
      evaluate_condition(program.sensor_condition, state.din_history, program.debounce_ticks);
  const std::uint32_t timeout = cfg.timeout_ticks();
  const bool timed_out = timeout != 0 && state.ticks_in_phase >= timeout;

  bool advance = false;
  switch (program.transition_mode) {
    case TransitionMode::advance_on_sensor: advance = sensor; break;
    case TransitionMode::advance_on_timeout: advance = timed_out; break;
    case TransitionMode::sensor_or_timeout:
    case TransitionMode::loop: advance = sensor || timed_out; break;
  }

  if (advance) {
    r.transitioned_from = state.phase;
    switch (state.phase) {
      case Phase::p1: state.phase = Phase::p2; break;
      case Phase::p2: state.phase = Phase::p3; break;
      case Phase::p3:
        state.phase =
            program.transition_mode == TransitionMode::loop ? Phase::p1 : Phase::halted;
        break;
      case Phase::halted: break;
    }
    state.ticks_in_phase = 0;
    state.dout = true;
  }

  if (state.phase == Phase::halted) {
    state.act_out = 0;
  } else {
    const auto& now = program.phases[static_cast<std::size_t>(state.phase) - 1];
    state.act_out = pulse_schedule(now.act_mask, now.period_ticks(), now.duty(),
                                   state.ticks_in_phase);
    ++state.ticks_in_phase;
  }

  r.state = state;
  r.act_out = state.act_out;
  r.dout = state.dout;
  return r;
}

Lablet::Lablet(LabletProgram program, bool start_running)
    : program_(with_parity(program)) {
  state_.running = start_running;
}

Lablet::CommandOutcome Lablet::apply(std::uint8_t command, const RunCommandBits& payload) {
  switch (command) {
    case static_cast<std::uint8_t>(Opcode::load): {
      try {
        program_ = decode_run_command(payload);
      } catch (const RejectedProgram&) {
        return CommandOutcome::rejected;
      }
      state_ = ControllerState{};
      return CommandOutcome::applied;
    }
    case static_cast<std::uint8_t>(Opcode::run):
      if (!program_) return CommandOutcome::ignored;
      state_.phase = Phase::p1;
      state_.ticks_in_phase = 0;
      state_.running = true;
      return CommandOutcome::applied;
    case static_cast<std::uint8_t>(Opcode::halt):
      if (!state_.running) return CommandOutcome::ignored;
      state_.phase = Phase::halted;
      state_.act_out = 0;
      return CommandOutcome::applied;
    case static_cast<std::uint8_t>(Opcode::reset):
      state_ = ControllerState{};
      return CommandOutcome::applied;
    default:
      return CommandOutcome::ignored;
  }
}

StepResult Lablet::step(bool din) {
  if (!program_) {
    state_.din_history.push(din);
    state_.act_out = 0;
    state_.dout = false;
    StepResult r;
    r.state = state_;
    return r;
  }
  StepResult r = step_controller(state_, *program_, din);
  state_ = r.state;
  return r;
}

void Lablet::power_loss() { state_ = ControllerState{}; }

}  // namespace smartlet::vm
