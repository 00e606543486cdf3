#include "carebot/supervision.hpp"

#include <stdexcept>

#include "carebot/json_reader.hpp"

namespace carebot {

SupervisionCommand SupervisionCommand::select_scenario(std::string id) {
  SupervisionCommand c;
  c.kind = CommandKind::SelectScenario;
  c.scenario_id = std::move(id);
  return c;
}

SupervisionCommand SupervisionCommand::set_mode(ControllerMode m) {
  SupervisionCommand c;
  c.kind = CommandKind::SetMode;
  c.mode = m;
  return c;
}

SupervisionCommand SupervisionCommand::approve(std::int64_t id) {
  SupervisionCommand c;
  c.kind = CommandKind::Approve;
  c.behavior_id = id;
  return c;
}

SupervisionCommand SupervisionCommand::deny(std::int64_t id) {
  SupervisionCommand c;
  c.kind = CommandKind::Deny;
  c.behavior_id = id;
  return c;
}

SupervisionCommand SupervisionCommand::override_behavior(std::string tag) {
  SupervisionCommand c;
  c.kind = CommandKind::OverrideBehavior;
  c.tag = std::move(tag);
  return c;
}

SupervisionCommand SupervisionCommand::set_difficulty(int level) {
  SupervisionCommand c;
  c.kind = CommandKind::SetDifficulty;
  c.level = level;
  return c;
}

nlohmann::json to_json(const SupervisionCommand& c) {
  nlohmann::json payload = nlohmann::json::object();
  switch (c.kind) {
    case CommandKind::SelectScenario: payload["scenario_id"] = c.scenario_id.value_or(""); break;
    case CommandKind::SetMode: payload["mode"] = c.mode ? to_string(*c.mode) : ""; break;
    case CommandKind::Approve:
    case CommandKind::Deny: payload["behavior_id"] = c.behavior_id.value_or(-1); break;
    case CommandKind::OverrideBehavior: payload["tag"] = c.tag.value_or(""); break;
    case CommandKind::SetDifficulty: payload["level"] = c.level.value_or(0); break;
    default: break;
  }
  nlohmann::json j{{"kind", to_string(c.kind)}, {"payload", payload}};
  if (c.correlation_id) j["correlation_id"] = *c.correlation_id;
  return j;
}

SupervisionCommand command_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("command needs a string 'kind'");
  }
  auto kind = parse_command_kind(j["kind"].get<std::string>());
  if (!kind) throw std::invalid_argument("unknown command kind '" + j["kind"].get<std::string>() + "'");
  const nlohmann::json empty = nlohmann::json::object();
  const auto& payload = j.contains("payload") ? j["payload"] : empty;
  if (!payload.is_object()) throw std::invalid_argument("payload must be an object");

  auto need = [&](const char* key, auto check) -> const nlohmann::json& {
    if (!payload.contains(key) || !check(payload[key])) {
      throw std::invalid_argument(std::string("payload.") + key + " missing or of the wrong type");
    }
    return payload[key];
  };
  auto is_string = [](const nlohmann::json& v) { return v.is_string(); };
  auto is_int = [](const nlohmann::json& v) { return v.is_number_integer(); };

  SupervisionCommand c;
  c.kind = *kind;
  switch (*kind) {
    case CommandKind::SelectScenario: c.scenario_id = need("scenario_id", is_string).get<std::string>(); break;
    case CommandKind::SetMode: {
      const auto name = need("mode", is_string).get<std::string>();
      c.mode = parse_mode(name);
      if (!c.mode) throw std::invalid_argument("unknown mode '" + name + "'");
      break;
    }
    case CommandKind::Approve:
    case CommandKind::Deny: c.behavior_id = need("behavior_id", is_int).get<std::int64_t>(); break;
    case CommandKind::OverrideBehavior: c.tag = need("tag", is_string).get<std::string>(); break;
    case CommandKind::SetDifficulty: c.level = need("level", is_int).get<int>(); break;
    default: break;
  }
  if (j.contains("correlation_id") && j["correlation_id"].is_string()) {
    c.correlation_id = j["correlation_id"].get<std::string>();
  }
  return c;
}

nlohmann::json to_json(const Acknowledgment& a) {
  nlohmann::json j{{"kind", to_string(a.kind)}, {"accepted", a.accepted}, {"reason", a.reason}, {"tick", a.tick}};
  put_optional(j, "correlation_id", a.correlation_id);
  return j;
}

Acknowledgment ack_from_json(const nlohmann::json& j) {
  Acknowledgment a;
  auto kind = parse_command_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown command kind");
  a.kind = *kind;
  a.accepted = j.at("accepted").get<bool>();
  a.reason = j.at("reason").get<std::string>();
  a.tick = j.at("tick").get<Tick>();
  a.correlation_id = get_optional<std::string>(j, "correlation_id");
  return a;
}

}  // namespace carebot
