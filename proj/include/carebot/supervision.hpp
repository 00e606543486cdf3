#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "carebot/common.hpp"

namespace carebot {

enum class ControllerMode { Autonomous, Approval, WizardOfOz, Paused, Stopped };

inline constexpr std::array<EnumName<ControllerMode>, 5> kModeNames{{
    {ControllerMode::Autonomous, "autonomous"},
    {ControllerMode::Approval, "approval"},
    {ControllerMode::WizardOfOz, "wizard_of_oz"},
    {ControllerMode::Paused, "paused"},
    {ControllerMode::Stopped, "stopped"},
}};
inline std::string_view to_string(ControllerMode m) { return enum_to_string(m, kModeNames); }
inline std::optional<ControllerMode> parse_mode(std::string_view s) { return enum_from_string(s, kModeNames); }

/// Modes a supervisor may select directly (paused/stopped come from pause/stop).
inline bool is_operating_mode(ControllerMode m) {
  return m == ControllerMode::Autonomous || m == ControllerMode::Approval || m == ControllerMode::WizardOfOz;
}

enum class CommandKind {
  SelectScenario,
  Start,
  Pause,
  Resume,
  Stop,
  SetMode,
  Approve,
  Deny,
  OverrideBehavior,
  SetDifficulty,
};

inline constexpr std::array<EnumName<CommandKind>, 10> kCommandNames{{
    {CommandKind::SelectScenario, "select_scenario"},
    {CommandKind::Start, "start"},
    {CommandKind::Pause, "pause"},
    {CommandKind::Resume, "resume"},
    {CommandKind::Stop, "stop"},
    {CommandKind::SetMode, "set_mode"},
    {CommandKind::Approve, "approve"},
    {CommandKind::Deny, "deny"},
    {CommandKind::OverrideBehavior, "override_behavior"},
    {CommandKind::SetDifficulty, "set_difficulty"},
}};
inline std::string_view to_string(CommandKind k) { return enum_to_string(k, kCommandNames); }
inline std::optional<CommandKind> parse_command_kind(std::string_view s) {
  return enum_from_string(s, kCommandNames);
}

/// Only the payload field belonging to `kind` is set.
struct SupervisionCommand {
  CommandKind kind = CommandKind::Pause;
  std::optional<std::string> scenario_id;      // select_scenario
  std::optional<ControllerMode> mode;          // set_mode
  std::optional<std::int64_t> behavior_id;     // approve, deny
  std::optional<std::string> tag;              // override_behavior
  std::optional<int> level;                    // set_difficulty
  std::optional<std::string> correlation_id;

  bool operator==(const SupervisionCommand&) const = default;

  static SupervisionCommand simple(CommandKind kind) {
    SupervisionCommand c;
    c.kind = kind;
    return c;
  }
  static SupervisionCommand select_scenario(std::string id);
  static SupervisionCommand set_mode(ControllerMode m);
  static SupervisionCommand approve(std::int64_t id);
  static SupervisionCommand deny(std::int64_t id);
  static SupervisionCommand override_behavior(std::string tag);
  static SupervisionCommand set_difficulty(int level);
};

struct Acknowledgment {
  std::optional<std::string> correlation_id;
  CommandKind kind = CommandKind::Pause;
  bool accepted = false;
  std::string reason;
  Tick tick = 0;

  bool operator==(const Acknowledgment&) const = default;
};

/// `{kind, payload}`; the payload keys are part of the wire contract.
nlohmann::json to_json(const SupervisionCommand& c);
/// Throws std::invalid_argument naming the bad field.
SupervisionCommand command_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Acknowledgment& a);
Acknowledgment ack_from_json(const nlohmann::json& j);

}  // namespace carebot
