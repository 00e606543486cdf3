#include "carebot/motion.hpp"

#include <cmath>
#include <sstream>

#include "carebot/json_reader.hpp"

namespace carebot {

std::set<std::string> RobotMorphology::capabilities() const {
  std::set<std::string> out;
  for (const auto& [id, _] : au_map) out.insert(id);
  return out;
}

RobotMorphology load_morphology(const nlohmann::json& j, const std::string& source) {
  JsonReader root(j, source);
  RobotMorphology m;
  m.robot_id = root.at("robot_id").string();
  if (m.robot_id.empty()) root.at("robot_id").fail("robot_id must be non-empty");

  for (const auto& [name, spec] : root.at("joints").members()) {
    JointSpec js;
    js.min = spec.at("min").number();
    js.max = spec.at("max").number();
    if (!(js.min < js.max)) spec.fail("joint min must be < max");
    js.max_velocity = spec.at("max_velocity").number();
    if (!(js.max_velocity > 0.0)) spec.at("max_velocity").fail("max_velocity must be > 0");
    js.neutral = spec.at("neutral").number_in(js.min, js.max);
    m.joints.emplace(name, js);
  }
  if (m.joints.empty()) root.at("joints").fail("a morphology needs at least one joint");

  for (const auto& [au, list] : root.at("au_map").members()) {
    if (!is_registered_unit(au)) list.fail("unregistered action unit '" + au + "'");
    std::vector<JointContribution> contributions;
    for (const auto& c : list.elements()) {
      JointContribution jc;
      jc.joint = c.at("joint").string();
      if (!m.joints.contains(jc.joint)) c.at("joint").fail("unknown joint '" + jc.joint + "'");
      jc.gain = c.at("gain").number();
      jc.offset = c.number_or("offset", 0.0);
      contributions.push_back(std::move(jc));
    }
    if (contributions.empty()) list.fail("action unit maps to no joints");
    m.au_map.emplace(au, std::move(contributions));
  }

  if (auto fb = root.find("fallbacks")) {
    for (const auto& [from, to] : fb->members()) {
      if (!is_registered_unit(from)) to.fail("unregistered action unit '" + from + "'");
      m.fallbacks.emplace(from, to.string());
    }
    for (const auto& [from, to] : m.fallbacks) {
      const auto where = fb->at(from);
      // Walk the chain first so cycles are reported as such.
      std::set<std::string> seen{from};
      std::string cursor = to;
      while (m.fallbacks.contains(cursor)) {
        if (!seen.insert(cursor).second) where.fail("fallback cycle through '" + cursor + "'");
        cursor = m.fallbacks.at(cursor);
      }
      if (cursor == from) where.fail("fallback cycle through '" + from + "'");
      if (m.can(from)) where.fail("'" + from + "' is directly mapped and cannot have a fallback");
      if (!m.can(to)) where.fail("fallback target '" + to + "' is not a capability of this robot");
    }
  }
  return m;
}

RobotMorphology load_morphology_file(const std::filesystem::path& file) {
  return load_morphology(load_json_file(file), file.string());
}

MotionScript map_behavior(const AbstractBehavior& behavior, const RobotMorphology& morph) {
  MotionScript script;
  script.robot_id = morph.robot_id;
  script.tag = behavior.tag;
  script.speech = behavior.speech;
  script.gaze_target = behavior.gaze_target;

  // Resolve substitutions; a unit requested twice keeps the stronger request.
  std::map<std::string, ActionUnit> performed;
  auto perform = [&](const std::string& id, const ActionUnit& u) {
    auto [it, inserted] = performed.try_emplace(id, ActionUnit{id, u.intensity, u.duration});
    if (!inserted) {
      it->second.intensity = std::max(it->second.intensity, u.intensity);
      it->second.duration = std::max(it->second.duration, u.duration);
    }
  };
  for (const auto& u : behavior.units) {
    if (morph.can(u.id)) {
      perform(u.id, u);
    } else if (auto fb = morph.fallbacks.find(u.id); fb != morph.fallbacks.end()) {
      script.substitutions[u.id] = fb->second;
      perform(fb->second, u);
    } else {
      script.unmapped.push_back(u.id);
    }
  }
  if (performed.empty()) return script;

  const double speed = behavior.speed_scale > 0.0 ? behavior.speed_scale : 1.0;
  std::map<std::string, double> delta;
  std::map<std::string, Tick> arrival;
  for (const auto& [id, u] : performed) {
    const Tick t = std::max<Tick>(1, static_cast<Tick>(std::ceil(static_cast<double>(u.duration) / speed)));
    for (const auto& c : morph.au_map.at(id)) {
      delta[c.joint] += c.gain * u.intensity * behavior.amplitude_scale + c.offset;
      arrival[c.joint] = std::max(arrival[c.joint], t);
    }
  }

  std::map<Tick, Keyframe> frames;
  for (const auto& [joint, d] : delta) {
    const auto& spec = morph.joints.at(joint);
    const double target = std::clamp(spec.neutral + d, spec.min, spec.max);
    const double distance = target - spec.neutral;
    const Tick t = arrival[joint];
    const auto steps_needed = static_cast<Tick>(std::ceil(std::abs(distance) / spec.max_velocity - 1e-12));
    if (steps_needed <= t) {
      frames[t].targets[joint] = target;
      continue;
    }
    // Too fast for this joint: subdivide into max-velocity steps.
    const double dir = distance < 0.0 ? -1.0 : 1.0;
    for (Tick k = 1; k <= steps_needed; ++k) {
      const double travelled = std::min(std::abs(distance), static_cast<double>(k) * spec.max_velocity);
      frames[k].targets[joint] = k == steps_needed ? target : spec.neutral + dir * travelled;
    }
  }
  for (auto& [offset, frame] : frames) {
    frame.offset = offset;
    script.keyframes.push_back(std::move(frame));
  }
  return script;
}

MotionScript neutral_pose_script(const RobotMorphology& morph, std::string tag) {
  MotionScript script;
  script.robot_id = morph.robot_id;
  script.tag = std::move(tag);
  Keyframe frame;
  frame.offset = 1;
  for (const auto& [name, spec] : morph.joints) frame.targets[name] = spec.neutral;
  script.keyframes.push_back(std::move(frame));
  return script;
}

std::vector<std::string> script_violations(const MotionScript& script, const RobotMorphology& morph,
                                           double tolerance) {
  std::vector<std::string> out;
  std::map<std::string, std::pair<Tick, double>> last;  // joint -> (offset, position)
  Tick prev_offset = 0;
  for (const auto& frame : script.keyframes) {
    if (frame.offset <= prev_offset) out.push_back("keyframe offsets not strictly increasing");
    prev_offset = frame.offset;
    for (const auto& [joint, target] : frame.targets) {
      auto spec_it = morph.joints.find(joint);
      if (spec_it == morph.joints.end()) {
        out.push_back("unknown joint " + joint);
        continue;
      }
      const auto& spec = spec_it->second;
      if (target < spec.min - tolerance || target > spec.max + tolerance) {
        std::ostringstream msg;
        msg << joint << " target " << target << " outside [" << spec.min << ", " << spec.max << "]";
        out.push_back(msg.str());
      }
      auto [it, fresh] = last.try_emplace(joint, Tick{0}, spec.neutral);
      const double dt = static_cast<double>(frame.offset - it->second.first);
      if (std::abs(target - it->second.second) > spec.max_velocity * dt + tolerance) {
        std::ostringstream msg;
        msg << joint << " moves " << std::abs(target - it->second.second) << " in " << dt << " ticks";
        out.push_back(msg.str());
      }
      it->second = {frame.offset, target};
    }
  }
  return out;
}

nlohmann::json to_json(const MotionScript& s) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : s.keyframes) frames.push_back({{"offset", f.offset}, {"targets", f.targets}});
  nlohmann::json j{{"robot_id", s.robot_id},   {"tag", s.tag}, {"keyframes", frames},
                   {"unmapped", s.unmapped}, {"substitutions", s.substitutions}};
  put_optional(j, "speech", s.speech);
  put_optional(j, "gaze_target", s.gaze_target);
  return j;
}

MotionScript motion_script_from_json(const nlohmann::json& j) {
  MotionScript s;
  s.robot_id = j.at("robot_id").get<std::string>();
  s.tag = j.at("tag").get<std::string>();
  for (const auto& f : j.at("keyframes")) {
    s.keyframes.push_back({f.at("offset").get<Tick>(), f.at("targets").get<std::map<std::string, double>>()});
  }
  s.unmapped = j.at("unmapped").get<std::vector<std::string>>();
  s.substitutions = j.at("substitutions").get<std::map<std::string, std::string>>();
  s.speech = get_optional<std::string>(j, "speech");
  s.gaze_target = get_optional<std::string>(j, "gaze_target");
  return s;
}

}  // namespace carebot
