#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/fusion.hpp"

namespace carebot {

struct JointSpec {
  double min = 0.0;
  double max = 0.0;
  double max_velocity = 0.0;  // rad per tick
  double neutral = 0.0;

  bool operator==(const JointSpec&) const = default;
};

struct JointContribution {
  std::string joint;
  double gain = 0.0;
  double offset = 0.0;

  bool operator==(const JointContribution&) const = default;
};

/// A robot's actuation description: joints with limits, the linear mapping
/// from action units to joint targets, and one-level fallback substitutions
/// for units the robot cannot perform directly.
struct RobotMorphology {
  std::string robot_id;
  std::map<std::string, JointSpec> joints;
  std::map<std::string, std::vector<JointContribution>> au_map;
  std::map<std::string, std::string> fallbacks;

  bool can(std::string_view au) const { return au_map.find(std::string(au)) != au_map.end(); }
  std::set<std::string> capabilities() const;
  bool operator==(const RobotMorphology&) const = default;
};

RobotMorphology load_morphology(const nlohmann::json& j, const std::string& source);
RobotMorphology load_morphology_file(const std::filesystem::path& file);

struct Keyframe {
  Tick offset = 0;
  std::map<std::string, double> targets;  // joint -> radians

  bool operator==(const Keyframe&) const = default;
};

/// Robot-specific joint script. Every joint starts from its neutral position
/// at offset 0 and moves linearly between the keyframes that mention it.
struct MotionScript {
  std::string robot_id;
  std::string tag;
  std::vector<Keyframe> keyframes;
  std::optional<std::string> speech;
  std::optional<std::string> gaze_target;
  std::vector<std::string> unmapped;
  std::map<std::string, std::string> substitutions;  // requested unit -> performed unit

  bool operator==(const MotionScript&) const = default;
};

MotionScript map_behavior(const AbstractBehavior& behavior, const RobotMorphology& morph);

/// Script returning every joint to neutral; emitted on stop.
MotionScript neutral_pose_script(const RobotMorphology& morph, std::string tag = "neutral_pose");

/// Empty when every target is inside its joint limits and every per-joint
/// step respects max_velocity times the elapsed ticks.
std::vector<std::string> script_violations(const MotionScript& script, const RobotMorphology& morph,
                                           double tolerance = 1e-9);

nlohmann::json to_json(const MotionScript& s);
MotionScript motion_script_from_json(const nlohmann::json& j);

}  // namespace carebot
