#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "carebot/affect.hpp"
#include "carebot/behavior.hpp"
#include "carebot/layers.hpp"
#include "carebot/monitor.hpp"
#include "carebot/perception.hpp"
#include "carebot/scenario.hpp"

namespace carebot {

/// Everything a controller needs that is not per session.
struct ControllerConfig {
  std::string file;  // where it was loaded from; recorded in session headers
  AffectConfig affect;
  BehaviorLibrary library;
  RuleSet rules;
  PersonalityProfile robot_personality;
  PerceptionConfig perception;
  ReactiveConfig reactive;
  DriveConfig drives;
  DeliberationConfig deliberation;
  DifficultyPolicy difficulty;
};

/// Relative file references inside the config resolve against its directory.
ControllerConfig load_controller_config(const std::filesystem::path& file);

struct ScenarioEntry {
  Scenario scenario;
  std::string file;
};

using ScenarioCatalog = std::map<std::string, ScenarioEntry>;

ScenarioEntry load_scenario_entry(const std::filesystem::path& file, const BehaviorLibrary& library);

/// Every `*.json` in `dir`, keyed by scenario id.
ScenarioCatalog load_scenario_catalog(const std::filesystem::path& dir, const BehaviorLibrary& library);

/// Shipped data directory: $CAREBOT_DATA_DIR if set, else the build-time default.
std::filesystem::path default_data_dir();

}  // namespace carebot
