#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "carebot/affect.hpp"
#include "carebot/common.hpp"

namespace carebot {

/// Registered facial and body action unit ids. Everything downstream
/// (rules, morphologies, behavior files) is validated against this list.
inline constexpr std::array<std::string_view, 19> kActionUnitVocabulary{
    "face.smile",     "face.frown",      "face.brow_raise",   "face.brow_lower", "face.blink",
    "face.eyes_wide", "face.mouth_open", "face.lid_droop",    "body.arms_raise", "body.arms_open",
    "body.wave",      "body.point",      "body.lean_forward", "body.lean",       "body.head_turn",
    "body.head_down", "body.head_up",    "body.head_nod",     "body.clap",
};

bool is_registered_unit(std::string_view id);
inline bool is_facial_unit(std::string_view id) { return id.starts_with("face."); }
inline bool is_body_unit(std::string_view id) { return id.starts_with("body."); }

struct ActionUnit {
  std::string id;
  double intensity = 0.0;
  Tick duration = 1;

  bool operator==(const ActionUnit&) const = default;
};

/// Generation layer a behavior comes from. The order here is the fusion
/// priority order (later wins).
enum class Source { Reactive, Emotional, Deliberative };

inline constexpr std::array<EnumName<Source>, 3> kSourceNames{{
    {Source::Reactive, "reactive"},
    {Source::Emotional, "emotional"},
    {Source::Deliberative, "deliberative"},
}};
inline std::string_view to_string(Source s) { return enum_to_string(s, kSourceNames); }
inline std::optional<Source> parse_source(std::string_view s) { return enum_from_string(s, kSourceNames); }

/// Upper bound of each layer's priority band. Reactive <= 0.2 < emotional <= 0.3 < deliberative.
double band_ceiling(Source s);
inline constexpr double kDeliberativePriority = 0.8;

/// Per-unit limits attached by the self-monitor and enforced downstream.
struct UnitLimit {
  std::optional<double> max_intensity;
  std::optional<double> max_rate;  // intensity change per tick

  bool operator==(const UnitLimit&) const = default;
};

struct CandidateBehavior {
  Source source = Source::Reactive;
  std::vector<ActionUnit> units;  // sorted by id, ids unique
  std::optional<std::string> speech;
  std::optional<std::string> gaze_target;
  double priority = 0.0;
  std::string tag;
  std::map<std::string, UnitLimit> limits;

  bool operator==(const CandidateBehavior&) const = default;

  const ActionUnit* find_unit(std::string_view id) const;
};

/// Sorts by id and rejects duplicate ids.
void normalize_units(std::vector<ActionUnit>& units);

/// Splits a fused tag ("a+b+c") into its component behavior tags.
std::vector<std::string> split_tags(std::string_view tag);

enum class Drive { SocialContact, TaskProgress, Rest };

inline constexpr std::array<Drive, 3> kDrives{Drive::SocialContact, Drive::TaskProgress, Drive::Rest};
inline constexpr std::array<EnumName<Drive>, 3> kDriveNames{{
    {Drive::SocialContact, "social_contact"},
    {Drive::TaskProgress, "task_progress"},
    {Drive::Rest, "rest"},
}};
inline std::string_view to_string(Drive d) { return enum_to_string(d, kDriveNames); }
inline std::optional<Drive> parse_drive(std::string_view s) { return enum_from_string(s, kDriveNames); }

struct BehaviorDefinition {
  std::string tag;
  std::vector<ActionUnit> units;
  std::optional<std::string> speech;
  std::map<Drive, double> satisfies;
};

/// Named behaviors plus the lookup tables the layers use: emotion label ->
/// expression, drive -> autonomous behavior, drive -> re-engagement behavior.
class BehaviorLibrary {
 public:
  static BehaviorLibrary load(const nlohmann::json& j, const std::string& source);
  static BehaviorLibrary load_file(const std::filesystem::path& file);

  const BehaviorDefinition* find(std::string_view tag) const;
  const BehaviorDefinition& get(std::string_view tag) const;
  bool contains(std::string_view tag) const { return find(tag) != nullptr; }

  CandidateBehavior instantiate(std::string_view tag, Source source, double priority) const;

  const std::string& blink_tag() const { return blink_; }
  const std::string& gaze_shift_tag() const { return gaze_shift_; }
  const std::string& idle_tag() const { return idle_; }
  const std::string& expression_for(EmotionLabel label) const;
  const std::string& drive_behavior(Drive d) const { return drive_behaviors_.at(d); }
  const std::string& reengage_behavior(Drive d) const { return reengage_behaviors_.at(d); }

  /// Summed drive satisfactions of every component tag in `tag`.
  std::map<Drive, double> satisfactions_of(std::string_view tag) const;

  const std::map<std::string, BehaviorDefinition, std::less<>>& behaviors() const { return behaviors_; }

 private:
  std::map<std::string, BehaviorDefinition, std::less<>> behaviors_;
  std::string blink_, gaze_shift_, idle_;
  std::map<EmotionLabel, std::string> expressions_;
  std::map<Drive, std::string> drive_behaviors_;
  std::map<Drive, std::string> reengage_behaviors_;
};

nlohmann::json to_json(const ActionUnit& u);
ActionUnit unit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const UnitLimit& l);
UnitLimit limit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CandidateBehavior& b);
CandidateBehavior candidate_from_json(const nlohmann::json& j);

}  // namespace carebot
