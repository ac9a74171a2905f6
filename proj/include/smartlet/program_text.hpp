#pragma once

// Textual program format used by the assembler: one `key = value` per line,
// `#` starts a comment. Keys:
//
//   phaseN.act_mask      0..7 (decimal, or 0b101 binary; bit i = ACT-i)
//   phaseN.period_code   0..15
//   phaseN.duty_code     0..7
//   phaseN.timeout_code  0..15 (0 = no timeout)
//   sensor_condition     0..7 or its name (never, rising_edge, ...)
//   transition_mode      0..3 or its name (advance_on_sensor, ...)
//   debounce_ticks       0..7
//   reserved             0..15 (optional, defaults to 0)
//
// for N in 1..3. Every key except `reserved` is required.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "smartlet/lablet_vm.hpp"

namespace smartlet::vm {

/// Ordered key set of the text format (reserved last).
const std::vector<std::string>& program_field_names();

/// Builds a program from already-split fields. `locations` optionally maps a
/// key to its (line, column) for diagnostics. Throws ParseError naming the
/// offending field.
LabletProgram program_from_fields(
    const std::map<std::string, std::string>& fields,
    const std::map<std::string, std::pair<int, int>>& locations = {});

LabletProgram parse_program_text(std::string_view text);
std::string format_program_text(const LabletProgram& program);

RunCommandBits assemble(std::string_view program_text);
std::string disassemble(const RunCommandBits& bits);

}  // namespace smartlet::vm
