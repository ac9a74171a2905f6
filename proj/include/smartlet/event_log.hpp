#pragma once

// Line-delimited event log:
//
//   # smartlet-events v1 scenario=<name>
//   <tick>\t<robot>\t<kind>\t<key=value key=value ...>
//   # end ticks=<N> wall_ms=<X>
//
// Robot is `-` for world-level records. Values never contain spaces or tabs.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smartlet::log {

inline constexpr std::string_view kHeader = "# smartlet-events v1";

enum class Kind { pose, din, act, phase_transition, bubble, dock, undock, frame_rx, power };

std::string_view to_string(Kind k);
std::optional<Kind> parse_kind(std::string_view s);

struct Event {
  std::int64_t tick = 0;
  int robot = -1;  ///< -1 for world-level records
  Kind kind = Kind::pose;
  std::vector<std::pair<std::string, std::string>> fields;

  Event& add(std::string key, std::string value);
  Event& add(std::string key, double value, int precision);
  Event& add(std::string key, std::int64_t value);
  /// Empty string when absent.
  std::string get(std::string_view key) const;
  double number(std::string_view key) const;
};

/// Fixed-point text with `precision` decimals; never prints "-0".
std::string fixed(double value, int precision);

std::string format_event(const Event& e);
/// Throws ParseError (line 0) on malformed records.
Event parse_event(std::string_view line);

class EventLog {
 public:
  explicit EventLog(std::string scenario_name = {}) : name_(std::move(scenario_name)) {}
  void append(Event e) { events_.push_back(std::move(e)); }
  void append(const std::vector<Event>& es) { events_.insert(events_.end(), es.begin(), es.end()); }
  const std::vector<Event>& events() const { return events_; }
  const std::string& scenario_name() const { return name_; }

  std::string render(std::int64_t ticks, double wall_ms) const;
  void write(std::ostream& out, std::int64_t ticks, double wall_ms) const;

 private:
  std::string name_;
  std::vector<Event> events_;
};

struct ParsedLog {
  std::string scenario_name;
  std::vector<Event> events;
  std::optional<std::int64_t> ticks;  ///< from the trailer
};

/// Throws ParseError with the 1-based line of the offending record.
ParsedLog parse_log(std::string_view text);

/// Replaces wall-clock fields so runs compare byte-for-byte.
std::string normalize(std::string_view text);

struct VerifyResult {
  bool pass = true;
  std::size_t line = 0;  ///< 1-based first divergent line, 0 on pass
  std::string log_line;
  std::string golden_line;
};

VerifyResult verify(std::string_view log_text, std::string_view golden_text);

}  // namespace smartlet::log
