#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/common.hpp"

namespace carebot {

enum class Channel { Gaze, Touch, Audio, TaskInput };

inline constexpr std::array<EnumName<Channel>, 4> kChannelNames{{
    {Channel::Gaze, "gaze"},
    {Channel::Touch, "touch"},
    {Channel::Audio, "audio"},
    {Channel::TaskInput, "task_input"},
}};

enum class EventKind {
  GazeOnRobot,
  GazeAway,
  TouchRobot,
  UtteranceHeard,
  TaskResponseCorrect,
  TaskResponseWrong,
  TaskResponseNone,
};

inline constexpr std::array<EnumName<EventKind>, 7> kEventKindNames{{
    {EventKind::GazeOnRobot, "GazeOnRobot"},
    {EventKind::GazeAway, "GazeAway"},
    {EventKind::TouchRobot, "TouchRobot"},
    {EventKind::UtteranceHeard, "UtteranceHeard"},
    {EventKind::TaskResponseCorrect, "TaskResponseCorrect"},
    {EventKind::TaskResponseWrong, "TaskResponseWrong"},
    {EventKind::TaskResponseNone, "TaskResponseNone"},
}};

inline std::string_view to_string(Channel c) { return enum_to_string(c, kChannelNames); }
inline std::string_view to_string(EventKind k) { return enum_to_string(k, kEventKindNames); }
inline std::optional<Channel> parse_channel(std::string_view s) {
  return enum_from_string(s, kChannelNames);
}
inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  return enum_from_string(s, kEventKindNames);
}

inline bool is_task_response(EventKind k) {
  return k == EventKind::TaskResponseCorrect || k == EventKind::TaskResponseWrong ||
         k == EventKind::TaskResponseNone;
}

/// One raw reading, as delivered by a sensor front end or the simulator.
/// Payload meaning depends on channel: gaze target id, touch location id,
/// utterance text, or answer token (empty / "none" = no answer).
struct RawSensorRecord {
  Tick tick = 0;
  Channel channel = Channel::Gaze;
  std::string payload;
  double confidence = 1.0;

  bool operator==(const RawSensorRecord&) const = default;
};

struct InteractionEvent {
  Tick tick = 0;
  EventKind kind = EventKind::GazeAway;
  double confidence = 1.0;

  bool operator==(const InteractionEvent&) const = default;
};

struct EngagementEstimate {
  double value = 0.0;
  int window_ticks = 1;
  /// "gaze", "response", "touch" -> weighted contribution
  std::map<std::string, double> components;
};

struct PerceptionConfig {
  double confidence_floor = 0.2;
  double gaze_weight = 0.4;
  double response_weight = 0.4;
  double touch_weight = 0.2;
  int window_ticks = 50;
  std::string robot_id = "robot";
};

/// Malformed replay line or unknown channel.
class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps one raw record to an interaction event. Task inputs are scored
/// against `expected_token`; without an outstanding prompt they yield nothing.
std::optional<InteractionEvent> interpret(const RawSensorRecord& record,
                                          const std::optional<std::string>& expected_token,
                                          const PerceptionConfig& config = {});

/// Engagement over events with tick in (now - window, now].
EngagementEstimate estimate_engagement(std::span<const InteractionEvent> events, Tick now, int window,
                                       const PerceptionConfig& config = {});

RawSensorRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RawSensorRecord& r);
nlohmann::json to_json(const InteractionEvent& e);
InteractionEvent event_from_json(const nlohmann::json& j);

struct RejectedRecord {
  std::size_t line = 0;
  std::string reason;
};

struct ReplayStream {
  std::vector<RawSensorRecord> records;
  std::vector<RejectedRecord> rejected;
};

/// Reads line-delimited records. Bad lines are collected in `rejected`, the
/// stream continues. Ticks must be non-decreasing; regressions are rejected.
ReplayStream read_replay(std::istream& in);

void apply_perception_overrides(PerceptionConfig& config, const nlohmann::json& overrides,
                                const std::string& source);

}  // namespace carebot
