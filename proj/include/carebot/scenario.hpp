#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/behavior.hpp"
#include "carebot/layers.hpp"
#include "carebot/perception.hpp"

namespace carebot {

struct EntryAction {
  std::string behavior;
  bool expects_response = false;
  std::optional<std::string> fixed_token;  // otherwise drawn from the level's token set

  bool operator==(const EntryAction&) const = default;
};

struct StateDef {
  std::string name;
  std::optional<EntryAction> entry;

  bool operator==(const StateDef&) const = default;
};

/// engagement_min <= engagement < engagement_max (no upper bound when unset).
struct Guard {
  double engagement_min = 0.0;
  std::optional<double> engagement_max;

  bool admits(double engagement) const;
  bool overlaps(const Guard& other) const;
  bool operator==(const Guard&) const = default;
};

struct Transition {
  std::string from;
  EventKind on = EventKind::GazeOnRobot;
  Guard guard;
  std::string to;
  std::vector<std::string> increments;

  bool operator==(const Transition&) const = default;
};

struct GoalCondition {
  std::string counter;
  std::int64_t at_least = 0;

  bool operator==(const GoalCondition&) const = default;
};

struct DifficultyLevel {
  Tick prompt_delay = 30;
  int token_set_size = 1;

  bool operator==(const DifficultyLevel&) const = default;
};

/// A therapeutic protocol as a flat state machine with counters and guards.
struct Scenario {
  std::string id;
  std::string description;
  std::vector<StateDef> states;
  std::vector<Transition> transitions;
  std::string initial;
  std::optional<std::string> goal_state;
  std::vector<std::string> counters;
  std::vector<GoalCondition> goal;  // all must hold
  std::vector<DifficultyLevel> levels;
  std::vector<std::string> tokens;
  nlohmann::json perception_overrides;  // null when absent
  std::optional<double> engage_threshold;

  const StateDef* find_state(std::string_view name) const;
  std::vector<std::string> entry_behaviors() const;
};

struct GuardOverlap {
  std::size_t first = 0;
  std::size_t second = 0;
};

/// Pairs of transitions that could both fire on the same (state, event, engagement).
std::vector<GuardOverlap> find_guard_overlaps(const Scenario& scenario);

Scenario load_scenario(const nlohmann::json& j, const std::string& source);
Scenario load_scenario_file(const std::filesystem::path& file);

/// Throws LoadError if an entry behavior is missing from the library.
void check_behaviors(const Scenario& scenario, const BehaviorLibrary& library, const std::string& source);

struct ScenarioState {
  std::string current;
  std::map<std::string, std::int64_t> counters;
  int difficulty = 0;
  bool goal_reached = false;
  std::optional<ScenarioAction> pending;
  Tick action_ready_tick = 0;
  std::int64_t prompts_entered = 0;
  std::optional<Tick> last_difficulty_change;

  bool operator==(const ScenarioState&) const = default;
};

ScenarioState initial_state(const Scenario& scenario, Tick now = 0);

bool goal_holds(const Scenario& scenario, const std::map<std::string, std::int64_t>& counters);

/// Fires the (unique) matching transition, or returns `state` unchanged.
ScenarioState advance(const ScenarioState& state, const Scenario& scenario, const InteractionEvent& event,
                      double engagement, Tick now);

struct DifficultyPolicy {
  double raise_at = 0.8;
  double lower_at = 0.3;
  Tick hysteresis_ticks = 100;
  std::size_t window_events = 10;
};

ScenarioState adjust_difficulty(const ScenarioState& state, const Scenario& scenario, double performance,
                                Tick now, const DifficultyPolicy& policy = {});

/// Supervisor override; clamps into the level range.
ScenarioState set_difficulty(const ScenarioState& state, const Scenario& scenario, int level, Tick now);

/// The pending entry action, once it is due.
std::optional<ScenarioAction> due_action(const ScenarioState& state, Tick now);

/// Called after the pending action is emitted: prompts expecting an answer are
/// re-armed after the level's prompt delay, other actions are consumed.
ScenarioState mark_action_issued(const ScenarioState& state, const Scenario& scenario, Tick now);

struct ScenarioStep {
  EventKind event = EventKind::GazeOnRobot;
  double engagement = 0.0;
};

/// Breadth-first search over event sequences up to `max_length`; returns the
/// shortest goal-reaching sequence, if any.
std::optional<std::vector<ScenarioStep>> find_goal_path(const Scenario& scenario, std::size_t max_length = 30);

nlohmann::json to_json(const ScenarioState& s);
ScenarioState scenario_state_from_json(const nlohmann::json& j);

}  // namespace carebot
