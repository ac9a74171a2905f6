#include "smartlet/event_log.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <regex>
#include <sstream>

#include "smartlet/errors.hpp"

namespace smartlet::log {

namespace {

constexpr std::array<std::string_view, 9> kNames = {
    "pose", "din", "act", "phase_transition", "bubble", "dock", "undock", "frame_rx", "power"};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Kind k) { return kNames[static_cast<std::size_t>(k)]; }

std::optional<Kind> parse_kind(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<Kind>(i);
  }
  return std::nullopt;
}

std::string fixed(double value, int precision) {
  if (!std::isfinite(value)) throw NumericError("non-finite value in event log");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

Event& Event::add(std::string key, std::string value) {
  fields.emplace_back(std::move(key), std::move(value));
  return *this;
}

Event& Event::add(std::string key, double value, int precision) {
  return add(std::move(key), fixed(value, precision));
}

Event& Event::add(std::string key, std::int64_t value) {
  return add(std::move(key), std::to_string(value));
}

std::string Event::get(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  return {};
}

double Event::number(std::string_view key) const {
  const auto v = get(key);
  if (v.empty()) return std::nan("");
  return std::stod(v);
}

std::string format_event(const Event& e) {
  std::string out = std::to_string(e.tick);
  out += '\t';
  out += e.robot < 0 ? "-" : std::to_string(e.robot);
  out += '\t';
  out += to_string(e.kind);
  out += '\t';
  for (std::size_t i = 0; i < e.fields.size(); ++i) {
    if (i) out += ' ';
    out += e.fields[i].first;
    out += '=';
    out += e.fields[i].second;
  }
  return out;
}

Event parse_event(std::string_view line) {
  const auto cols = split(line, '\t');
  if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", 0, 0);
  Event e;
  auto [p, ec] = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), e.tick);
  if (ec != std::errc{} || p != cols[0].data() + cols[0].size()) {
    throw ParseError("bad tick '" + std::string(cols[0]) + "'", 0, 1);
  }
  if (cols[1] != "-") {
    auto [q, ec2] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), e.robot);
    if (ec2 != std::errc{} || q != cols[1].data() + cols[1].size()) {
      throw ParseError("bad robot '" + std::string(cols[1]) + "'", 0, 2);
    }
  }
  auto kind = parse_kind(cols[2]);
  if (!kind) throw ParseError("unknown kind '" + std::string(cols[2]) + "'", 0, 3);
  e.kind = *kind;
  if (!cols[3].empty()) {
    for (auto kv : split(cols[3], ' ')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError("bad field '" + std::string(kv) + "'", 0, 4);
      }
      e.add(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
  }
  return e;
}

std::string EventLog::render(std::int64_t ticks, double wall_ms) const {
  std::ostringstream out;
  write(out, ticks, wall_ms);
  return out.str();
}

void EventLog::write(std::ostream& out, std::int64_t ticks, double wall_ms) const {
  out << kHeader << " scenario=" << (name_.empty() ? "-" : name_) << '\n';
  for (const auto& e : events_) out << format_event(e) << '\n';
  out << "# end ticks=" << ticks << " wall_ms=" << fixed(wall_ms, 1) << '\n';
}

ParsedLog parse_log(std::string_view text) {
  ParsedLog log;
  const auto lines = split(text, '\n');
  bool header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    const int line_no = static_cast<int>(i + 1);
    if (line.empty()) continue;
    if (line.starts_with('#')) {
      if (line.starts_with(kHeader)) {
        header = true;
        if (auto pos = line.find("scenario="); pos != std::string_view::npos) {
          log.scenario_name = std::string(line.substr(pos + 9));
          if (log.scenario_name == "-") log.scenario_name.clear();
        }
      } else if (line.starts_with("# end ticks=")) {
        const auto rest = line.substr(12);
        std::int64_t n = 0;
        std::from_chars(rest.data(), rest.data() + rest.size(), n);
        log.ticks = n;
      }
      continue;
    }
    if (!header) throw ParseError("missing smartlet-events header", line_no, 1);
    try {
      log.events.push_back(parse_event(line));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no, e.column());
    }
  }
  if (!header) throw ParseError("missing smartlet-events header", 1, 1);
  return log;
}

std::string normalize(std::string_view text) {
  static const std::regex wall("wall_ms=[-0-9.eE+naif]+");
  return std::regex_replace(std::string(text), wall, "wall_ms=*");
}

VerifyResult verify(std::string_view log_text, std::string_view golden_text) {
  const auto a = normalize(log_text);
  const auto b = normalize(golden_text);
  VerifyResult r;
  if (a == b) return r;
  const auto la = split(a, '\n');
  const auto lb = split(b, '\n');
  const std::size_t n = std::max(la.size(), lb.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view x = i < la.size() ? la[i] : std::string_view("<eof>");
    const std::string_view y = i < lb.size() ? lb[i] : std::string_view("<eof>");
    if (x != y) {
      r.pass = false;
      r.line = i + 1;
      r.log_line = x;
      r.golden_line = y;
      return r;
    }
  }
  r.pass = false;
  return r;
}

}  // namespace smartlet::log
