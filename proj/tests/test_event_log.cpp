#include <gtest/gtest.h>

#include <cmath>

#include "smartlet/errors.hpp"
#include "smartlet/event_log.hpp"

using namespace smartlet;
using namespace smartlet::log;

TEST(EventLog, FixedNeverNegativeZero) {
  EXPECT_EQ(fixed(-0.0, 3), "0.000");
  EXPECT_EQ(fixed(-0.00004, 4), "0.0000");
  EXPECT_EQ(fixed(-0.00005001, 4), "-0.0001");
  EXPECT_EQ(fixed(1.23456, 2), "1.23");
  EXPECT_THROW(fixed(std::nan(""), 2), NumericError);
}

TEST(EventLog, EventRoundTrip) {
  Event e{42, 3, Kind::bubble, {}};
  e.add("event", "lift").add("count", std::int64_t{36}).add("tilt", 8.6269, 2);
  const auto line = format_event(e);
  EXPECT_EQ(line, "42\t3\tbubble\tevent=lift count=36 tilt=8.63");
  const auto back = parse_event(line);
  EXPECT_EQ(back.tick, 42);
  EXPECT_EQ(back.robot, 3);
  EXPECT_EQ(back.kind, Kind::bubble);
  EXPECT_EQ(back.get("event"), "lift");
  EXPECT_DOUBLE_EQ(back.number("tilt"), 8.63);
  EXPECT_EQ(format_event(back), line);

  Event world{7, -1, Kind::power, {}};
  EXPECT_EQ(parse_event(format_event(world)).robot, -1);
}

TEST(EventLog, EveryKindNameRoundTrips) {
  for (int k = 0; k <= static_cast<int>(Kind::power); ++k) {
    const auto kind = static_cast<Kind>(k);
    EXPECT_EQ(parse_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_kind("teleport"));
}

TEST(EventLog, RenderParseRoundTrip) {
  EventLog log("demo");
  log.append(Event{0, 1, Kind::power, {{"on", "1"}}});
  log.append(Event{5, 1, Kind::din, {{"value", "1"}}});
  const auto text = log.render(10, 12.5);
  EXPECT_NE(text.find("# end ticks=10 wall_ms=12.5"), std::string::npos);
  const auto parsed = parse_log(text);
  EXPECT_EQ(parsed.scenario_name, "demo");
  ASSERT_EQ(parsed.events.size(), 2u);
  EXPECT_EQ(parsed.ticks, 10);
  EXPECT_EQ(parsed.events[1].get("value"), "1");
}

TEST(EventLog, ParseErrorsCarryLine) {
  const std::string text = std::string(kHeader) + " scenario=x\n0\t1\tpose\tx=1\n3\t1\twarp\tx=1\n";
  try {
    parse_log(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_log("0\t1\tpose\tx=1\n"), ParseError);
  EXPECT_THROW(parse_event("0\t1\tpose"), ParseError);
  EXPECT_THROW(parse_event("0\t1\tpose\tnovalue"), ParseError);
}

TEST(EventLog, VerifyIgnoresWallTimeOnly) {
  EventLog log("v");
  log.append(Event{1, 1, Kind::din, {{"value", "1"}}});
  const auto a = log.render(5, 10.0);
  const auto b = log.render(5, 999.9);
  EXPECT_TRUE(verify(a, a).pass);
  EXPECT_TRUE(verify(a, b).pass);

  EventLog other("v");
  other.append(Event{1, 1, Kind::din, {{"value", "0"}}});
  const auto r = verify(a, other.render(5, 10.0));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.line, 2u);
  EXPECT_EQ(r.log_line, "1\t1\tdin\tvalue=1");
  EXPECT_EQ(r.golden_line, "1\t1\tdin\tvalue=0");

  const auto shorter = verify(a, EventLog("v").render(5, 1.0));
  EXPECT_FALSE(shorter.pass);
  EXPECT_EQ(shorter.line, 2u);
}
