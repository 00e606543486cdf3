#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carebot/affect.hpp"
#include "carebot/behavior.hpp"
#include "carebot/rng.hpp"

namespace carebot {

// ---------------------------------------------------------------------------
// Reactive and attention layer

struct Stimulus {
  std::string id;
  double salience = 0.0;
};

struct ReactiveConfig {
  // Blink intervals are uniform in [min, max]; the default mean is 80 ticks.
  Tick blink_interval_min = 40;
  Tick blink_interval_max = 120;
  Tick idle_interval_min = 150;
  Tick idle_interval_max = 250;
  double gaze_threshold = 0.3;
  double blink_priority = 0.1;
  double gaze_priority = 0.2;
  double idle_priority = 0.05;
};

struct ReactiveState {
  Tick next_blink = 0;
  Tick next_idle = 0;

  bool operator==(const ReactiveState&) const = default;
};

struct ReactiveOutput {
  std::vector<CandidateBehavior> candidates;
  ReactiveState next;
};

ReactiveState initial_reactive_state(Rng& rng, Tick start, const ReactiveConfig& config = {});

/// Blinks and idle micro-motions on their seeded schedules, plus a gaze shift
/// toward the most salient stimulus. Only `rng` is mutated.
ReactiveOutput reactive_tick(std::span<const Stimulus> stimuli, Rng& rng, Tick tick,
                             const ReactiveState& state, const BehaviorLibrary& library,
                             const ReactiveConfig& config = {});

/// Folds several same-layer candidates into one. Conflicting units keep the
/// higher-priority candidate's value; tags are joined with '+'.
std::optional<CandidateBehavior> merge_candidates(std::span<const CandidateBehavior> candidates);

// ---------------------------------------------------------------------------
// Homeostatic drives

struct DriveLevel {
  double level = 0.5;
  double setpoint = 0.5;
  double drift = 0.0;  // per tick

  double deficit() const;
  bool operator==(const DriveLevel&) const = default;
};

struct DriveState {
  std::array<DriveLevel, 3> levels{};

  DriveLevel& operator[](Drive d) { return levels[static_cast<std::size_t>(d)]; }
  const DriveLevel& operator[](Drive d) const { return levels[static_cast<std::size_t>(d)]; }
  bool operator==(const DriveState&) const = default;
};

struct DriveConfig {
  std::array<double, 3> drift{0.02, 0.03, 0.01};
  std::array<double, 3> setpoint{0.5, 0.5, 0.5};
};

DriveState initial_drives(const DriveConfig& config = {});

DriveState drive_step(const DriveState& drives, const std::map<Drive, double>& satisfactions, Tick dt);

/// Largest deficit; ties go to the earlier drive in social < task < rest.
Drive max_deficit_drive(const DriveState& drives);

// ---------------------------------------------------------------------------
// Deliberation

/// What the scenario wants the robot to do next.
struct ScenarioAction {
  std::string behavior;
  std::optional<std::string> expected_token;

  bool operator==(const ScenarioAction&) const = default;
};

struct DeliberationConfig {
  double engage_threshold = 0.3;
  double deficit_floor = 0.25;
};

enum class DeliberativeReason { Reengage, Scenario, Drive };

struct DeliberativeChoice {
  CandidateBehavior behavior;
  DeliberativeReason reason = DeliberativeReason::Drive;
};

std::optional<DeliberativeChoice> select_deliberative(const DriveState& drives,
                                                      const std::optional<ScenarioAction>& scenario_action,
                                                      double engagement, const BehaviorLibrary& library,
                                                      const DeliberationConfig& config = {});

// ---------------------------------------------------------------------------
// Emotion expression

std::optional<CandidateBehavior> express_emotion(const EmotionState& emotion, const BehaviorLibrary& library);

}  // namespace carebot
