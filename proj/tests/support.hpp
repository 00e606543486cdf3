#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <unistd.h>
#include <string>

#include "carebot/config.hpp"
#include "carebot/controller.hpp"
#include "carebot/sim.hpp"

namespace carebot::test {

inline std::filesystem::path data_dir() { return CAREBOT_DEFAULT_DATA_DIR; }

inline std::shared_ptr<const ControllerConfig> shipped_config() {
  static auto cfg =
      std::make_shared<const ControllerConfig>(load_controller_config(data_dir() / "config" / "default.json"));
  return cfg;
}

inline ScenarioCatalog shipped_catalog() {
  return load_scenario_catalog(data_dir() / "scenarios", shipped_config()->library);
}

inline std::filesystem::path robot_file(const std::string& name) { return data_dir() / "robots" / (name + ".json"); }

inline RobotMorphology shipped_robot(const std::string& name) { return load_morphology_file(robot_file(name)); }

inline Persona shipped_persona(const std::string& name) {
  return load_persona_file(data_dir() / "personas" / (name + ".json"));
}

inline std::unique_ptr<Controller> make_controller(const std::string& scenario = "turn_taking",
                                                   ControllerMode mode = ControllerMode::Autonomous,
                                                   std::uint64_t seed = 42, const std::string& robot = "nao_like") {
  SessionSetup setup;
  setup.scenario_id = scenario;
  setup.mode = mode;
  setup.seed = seed;
  setup.robot_file = robot_file(robot).string();
  return std::make_unique<Controller>(shipped_config(), shipped_catalog(), shipped_robot(robot), setup);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("carebot_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace carebot::test
