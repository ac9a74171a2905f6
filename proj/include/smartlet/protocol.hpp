#pragma once

// JSON payload codecs shared by the session service, recordings and the
// headless replay. See docs/protocol.md.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartlet/event_log.hpp"
#include "smartlet/scenario.hpp"
#include "smartlet/world.hpp"

namespace smartlet::proto {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

json envelope(const std::string& session_id, std::int64_t seq, const std::string& kind,
              json payload);

json to_json(const world::Snapshot& s);
json to_json(const log::Event& e);

/// Kinds that change the world and therefore go into recordings.
bool is_world_command(const std::string& kind);

/// Decodes a world command payload. `context` supplies the arena for
/// robot placement. Throws InvalidParameter or ParseError.
world::Command command_from_json(const std::string& kind, const json& payload,
                                 const world::Scenario& context);

struct RecordedCommand {
  std::int64_t step = 0;  ///< ticks simulated before the command took effect
  std::string kind;
  json payload;
};

struct Recording {
  std::string scenario_yaml;
  std::vector<RecordedCommand> commands;
  std::int64_t steps = 0;  ///< total ticks simulated
};

json to_json(const Recording& r);
Recording recording_from_json(const json& j);

/// Re-runs a recording headlessly; the returned log text matches the live
/// session's log under verify().
std::string replay(const Recording& r);
log::EventLog replay_log(const Recording& r);

}  // namespace smartlet::proto
