#include "smartlet/program_text.hpp"

#include <charconv>
#include <sstream>

#include "smartlet/errors.hpp"

namespace smartlet::vm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Range {
  unsigned lo;
  unsigned hi;
};

Range range_of(const std::string& key) {
  if (key.ends_with("act_mask") || key.ends_with("duty_code")) return {0, 7};
  if (key.ends_with("period_code") || key.ends_with("timeout_code")) return {0, 15};
  if (key == "debounce_ticks") return {0, 7};
  if (key == "reserved") return {0, 15};
  if (key == "sensor_condition") return {0, 7};
  if (key == "transition_mode") return {0, 3};
  return {0, 0};
}

unsigned parse_number(const std::string& key, std::string_view value, int line, int col) {
  unsigned v = 0;
  int base = 10;
  std::string_view digits = value;
  if (digits.starts_with("0b") || digits.starts_with("0B")) {
    base = 2;
    digits.remove_prefix(2);
  } else if (digits.starts_with("0x") || digits.starts_with("0X")) {
    base = 16;
    digits.remove_prefix(2);
  }
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, v, base);
  if (ec != std::errc{} || ptr != end || digits.empty()) {
    throw ParseError("field '" + key + "' has non-numeric value '" + std::string(value) + "'",
                     line, col);
  }
  const Range r = range_of(key);
  if (v < r.lo || v > r.hi) {
    throw ParseError("field '" + key + "' = " + std::to_string(v) + " out of range [" +
                         std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]",
                     line, col);
  }
  return v;
}

}  // namespace

const std::vector<std::string>& program_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (int k = 1; k <= 3; ++k) {
      const std::string p = "phase" + std::to_string(k) + ".";
      for (const char* f : {"act_mask", "period_code", "duty_code", "timeout_code"}) {
        n.push_back(p + f);
      }
    }
    n.insert(n.end(), {"sensor_condition", "transition_mode", "debounce_ticks", "reserved"});
    return n;
  }();
  return names;
}

LabletProgram program_from_fields(const std::map<std::string, std::string>& fields,
                                  const std::map<std::string, std::pair<int, int>>& locations) {
  auto where = [&](const std::string& key) {
    auto it = locations.find(key);
    return it == locations.end() ? std::pair{0, 0} : it->second;
  };
  for (const auto& [key, value] : fields) {
    const auto& names = program_field_names();
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      auto [l, c] = where(key);
      throw ParseError("unknown field '" + key + "'", l, c);
    }
  }
  auto get = [&](const std::string& key) -> unsigned {
    auto it = fields.find(key);
    if (it == fields.end()) {
      if (key == "reserved") return 0;
      throw ParseError("missing field '" + key + "'", 0, 0);
    }
    auto [l, c] = where(key);
    if (key == "sensor_condition") {
      if (auto cond = parse_condition(it->second)) return static_cast<unsigned>(*cond);
    } else if (key == "transition_mode") {
      if (auto mode = parse_mode(it->second)) return static_cast<unsigned>(*mode);
    }
    return parse_number(key, it->second, l, c);
  };

  LabletProgram p;
  for (std::size_t k = 0; k < kPhaseCount; ++k) {
    const std::string pre = "phase" + std::to_string(k + 1) + ".";
    auto& ph = p.phases[k];
    ph.act_mask = static_cast<std::uint8_t>(get(pre + "act_mask"));
    ph.period_code = static_cast<std::uint8_t>(get(pre + "period_code"));
    ph.duty_code = static_cast<std::uint8_t>(get(pre + "duty_code"));
    ph.timeout_code = static_cast<std::uint8_t>(get(pre + "timeout_code"));
  }
  p.sensor_condition = static_cast<SensorCondition>(get("sensor_condition"));
  p.transition_mode = static_cast<TransitionMode>(get("transition_mode"));
  p.debounce_ticks = static_cast<std::uint8_t>(get("debounce_ticks"));
  p.reserved = static_cast<std::uint8_t>(get("reserved"));
  return with_parity(p);
}

LabletProgram parse_program_text(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::map<std::string, std::pair<int, int>> locations;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, 1);
    }
    std::string key(trim(raw.substr(0, eq)));
    std::string value(trim(raw.substr(eq + 1)));
    const int col = static_cast<int>(raw.find_first_not_of(" \t", eq + 1)) + 1;
    if (fields.contains(key)) {
      throw ParseError("duplicate field '" + key + "'", line_no, 1);
    }
    fields.emplace(key, value);
    locations.emplace(key, std::pair{line_no, col});
  }
  return program_from_fields(fields, locations);
}

std::string format_program_text(const LabletProgram& p) {
  std::ostringstream out;
  for (std::size_t k = 0; k < kPhaseCount; ++k) {
    const auto& ph = p.phases[k];
    const std::string pre = "phase" + std::to_string(k + 1) + ".";
    out << pre << "act_mask = " << unsigned{ph.act_mask} << '\n'
        << pre << "period_code = " << unsigned{ph.period_code} << '\n'
        << pre << "duty_code = " << unsigned{ph.duty_code} << '\n'
        << pre << "timeout_code = " << unsigned{ph.timeout_code} << '\n';
  }
  out << "sensor_condition = " << to_string(p.sensor_condition) << '\n'
      << "transition_mode = " << to_string(p.transition_mode) << '\n'
      << "debounce_ticks = " << unsigned{p.debounce_ticks} << '\n'
      << "reserved = " << unsigned{p.reserved} << '\n';
  return out.str();
}

RunCommandBits assemble(std::string_view program_text) {
  return encode_run_command(parse_program_text(program_text));
}

std::string disassemble(const RunCommandBits& bits) {
  return format_program_text(decode_run_command(bits));
}

}  // namespace smartlet::vm
