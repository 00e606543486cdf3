#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/affect.hpp"
#include "carebot/behavior.hpp"

namespace carebot {

/// The unified, platform-independent behavior handed to the motion system.
struct AbstractBehavior {
  std::vector<ActionUnit> units;  // one entry per id, sorted
  std::optional<std::string> speech;
  std::optional<std::string> gaze_target;
  double amplitude_scale = 1.0;
  double speed_scale = 1.0;
  std::map<std::string, Source> provenance;  // unit id -> contributing layer
  Tick tick = 0;
  std::string tag;  // component tags joined with '+', deliberative first
  std::map<std::string, UnitLimit> limits;

  bool empty() const { return units.empty() && !speech; }
  const ActionUnit* find_unit(std::string_view id) const;
  bool operator==(const AbstractBehavior&) const = default;
};

/// Union of the three vetted layer outputs. On a unit conflict the layer with
/// the higher priority band wins outright (deliberative > emotional > reactive).
AbstractBehavior fuse(const std::optional<CandidateBehavior>& reactive,
                      const std::optional<CandidateBehavior>& deliberative,
                      const std::optional<CandidateBehavior>& emotional, Tick tick = 0);

double amplitude_scale_for(double arousal, double extraversion);
double speed_scale_for(double arousal);

/// Scales the fused behavior by arousal and extraversion. `previous` holds the
/// unit intensities emitted on the prior tick, used for rate-cap annotations.
AbstractBehavior modulate(AbstractBehavior behavior, const MoodState& mood, const PersonalityProfile& personality,
                          const std::map<std::string, double>& previous = {});

/// View of a fused behavior as a candidate, for re-vetting.
CandidateBehavior as_candidate(const AbstractBehavior& behavior, Source source = Source::Deliberative);

nlohmann::json to_json(const AbstractBehavior& b);
AbstractBehavior abstract_behavior_from_json(const nlohmann::json& j);

}  // namespace carebot
