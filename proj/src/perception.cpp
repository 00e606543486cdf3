#include "carebot/perception.hpp"

#include "carebot/json_reader.hpp"

namespace carebot {

std::optional<InteractionEvent> interpret(const RawSensorRecord& record,
                                          const std::optional<std::string>& expected_token,
                                          const PerceptionConfig& config) {
  if (record.confidence < config.confidence_floor) return std::nullopt;

  InteractionEvent event{record.tick, EventKind::GazeAway, record.confidence};
  switch (record.channel) {
    case Channel::Gaze:
      event.kind = record.payload == config.robot_id ? EventKind::GazeOnRobot : EventKind::GazeAway;
      break;
    case Channel::Touch:
      event.kind = EventKind::TouchRobot;
      break;
    case Channel::Audio:
      event.kind = EventKind::UtteranceHeard;
      break;
    case Channel::TaskInput:
      if (!expected_token) return std::nullopt;
      if (record.payload.empty() || record.payload == "none") {
        event.kind = EventKind::TaskResponseNone;
      } else if (record.payload == *expected_token) {
        event.kind = EventKind::TaskResponseCorrect;
      } else {
        event.kind = EventKind::TaskResponseWrong;
      }
      break;
  }
  return event;
}

EngagementEstimate estimate_engagement(std::span<const InteractionEvent> events, Tick now, int window,
                                       const PerceptionConfig& config) {
  if (window < 1) throw std::invalid_argument("engagement window must be >= 1");

  int gaze_on = 0, gaze_away = 0;
  int correct = 0, scored = 0;
  bool touched = false;
  for (const auto& e : events) {
    if (e.tick > now || e.tick <= now - window) continue;
    switch (e.kind) {
      case EventKind::GazeOnRobot: ++gaze_on; break;
      case EventKind::GazeAway: ++gaze_away; break;
      case EventKind::TouchRobot: touched = true; break;
      case EventKind::TaskResponseCorrect: ++correct; ++scored; break;
      case EventKind::TaskResponseWrong:
      case EventKind::TaskResponseNone: ++scored; break;
      case EventKind::UtteranceHeard: break;
    }
  }

  const double gaze_ratio =
      gaze_on + gaze_away > 0 ? static_cast<double>(gaze_on) / (gaze_on + gaze_away) : 0.5;
  const double response_ratio = scored > 0 ? static_cast<double>(correct) / scored : 0.5;
  const double touch = touched ? 1.0 : 0.0;

  EngagementEstimate out;
  out.window_ticks = window;
  out.components["gaze"] = config.gaze_weight * gaze_ratio;
  out.components["response"] = config.response_weight * response_ratio;
  out.components["touch"] = config.touch_weight * touch;
  out.value = clamp01(out.components["gaze"] + out.components["response"] + out.components["touch"]);
  return out;
}

RawSensorRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RecordError("record must be an object");
  RawSensorRecord r;
  try {
    r.tick = j.at("tick").get<Tick>();
    const auto channel_name = j.at("channel").get<std::string>();
    auto channel = parse_channel(channel_name);
    if (!channel) throw RecordError("unknown channel '" + channel_name + "'");
    r.channel = *channel;
    r.payload = j.value("payload", std::string{});
    r.confidence = j.at("confidence").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
  if (r.tick < 0) throw RecordError("negative tick");
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) throw RecordError("confidence outside [0,1]");
  return r;
}

nlohmann::json to_json(const RawSensorRecord& r) {
  return {{"tick", r.tick}, {"channel", to_string(r.channel)}, {"payload", r.payload},
          {"confidence", r.confidence}};
}

nlohmann::json to_json(const InteractionEvent& e) {
  return {{"tick", e.tick}, {"kind", to_string(e.kind)}, {"confidence", e.confidence}};
}

InteractionEvent event_from_json(const nlohmann::json& j) {
  InteractionEvent e;
  e.tick = j.at("tick").get<Tick>();
  auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw RecordError("unknown event kind");
  e.kind = *kind;
  e.confidence = j.at("confidence").get<double>();
  return e;
}

ReplayStream read_replay(std::istream& in) {
  ReplayStream out;
  std::string line;
  std::size_t line_no = 0;
  Tick last_tick = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto record = record_from_json(j);
      if (record.tick < last_tick) throw RecordError("tick goes backwards");
      last_tick = record.tick;
      out.records.push_back(std::move(record));
    } catch (const nlohmann::json::parse_error&) {
      out.rejected.push_back({line_no, "syntax error"});
    } catch (const RecordError& e) {
      out.rejected.push_back({line_no, e.what()});
    }
  }
  return out;
}

void apply_perception_overrides(PerceptionConfig& config, const nlohmann::json& overrides,
                                const std::string& source) {
  JsonReader r(overrides, source, "$.perception");
  config.confidence_floor = r.has("confidence_floor") ? r.at("confidence_floor").number_in(0, 1)
                                                      : config.confidence_floor;
  config.gaze_weight = r.has("gaze_weight") ? r.at("gaze_weight").number_in(0, 1) : config.gaze_weight;
  config.response_weight =
      r.has("response_weight") ? r.at("response_weight").number_in(0, 1) : config.response_weight;
  config.touch_weight = r.has("touch_weight") ? r.at("touch_weight").number_in(0, 1) : config.touch_weight;
  if (r.has("window_ticks")) {
    const auto w = r.at("window_ticks").integer();
    if (w < 1) r.at("window_ticks").fail("window must be >= 1");
    config.window_ticks = static_cast<int>(w);
  }
  config.robot_id = r.string_or("robot_id", config.robot_id);
}

}  // namespace carebot
