#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "carebot/common.hpp"
#include "carebot/perception.hpp"

namespace carebot {

/// Five-Factor trait scores, each in [0,1].
struct PersonalityProfile {
  double openness = 0.5;
  double conscientiousness = 0.5;
  double extraversion = 0.5;
  double agreeableness = 0.5;
  double neuroticism = 0.5;

  bool operator==(const PersonalityProfile&) const = default;
};

/// Point on the valence/arousal plane plus the resting point it decays to.
struct MoodState {
  double valence = 0.0;
  double arousal = 0.0;
  double baseline_valence = 0.0;
  double baseline_arousal = 0.0;
  double decay_rate = 0.3;  // per tick, > 0

  bool operator==(const MoodState&) const = default;
};

struct Appraisal {
  double d_valence = 0.0;
  double d_arousal = 0.0;
  EventKind cause = EventKind::GazeOnRobot;
};

enum class EmotionLabel {
  Neutral,
  Pleasure,
  Excitement,
  Arousal,
  Distress,
  Misery,
  Depression,
  Sleepiness,
  Contentment,
};

inline constexpr std::array<EnumName<EmotionLabel>, 9> kEmotionNames{{
    {EmotionLabel::Neutral, "neutral"},
    {EmotionLabel::Pleasure, "pleasure"},
    {EmotionLabel::Excitement, "excitement"},
    {EmotionLabel::Arousal, "arousal"},
    {EmotionLabel::Distress, "distress"},
    {EmotionLabel::Misery, "misery"},
    {EmotionLabel::Depression, "depression"},
    {EmotionLabel::Sleepiness, "sleepiness"},
    {EmotionLabel::Contentment, "contentment"},
}};

inline std::string_view to_string(EmotionLabel l) { return enum_to_string(l, kEmotionNames); }
inline std::optional<EmotionLabel> parse_emotion(std::string_view s) {
  return enum_from_string(s, kEmotionNames);
}

struct EmotionState {
  EmotionLabel label = EmotionLabel::Neutral;
  double intensity = 0.0;

  bool operator==(const EmotionState&) const = default;
};

enum class AdaptationDirection { Similarity, Complementarity };

/// All tunables of the affect engine. Defaults are the shipped values; the
/// affect config file overrides any subset.
struct AffectConfig {
  // EventKind -> (d_valence, d_arousal) at confidence 1
  std::map<EventKind, std::pair<double, double>> appraisal_table{
      {EventKind::GazeOnRobot, {0.1, 0.05}},
      {EventKind::TaskResponseCorrect, {0.3, 0.2}},
      {EventKind::TaskResponseWrong, {-0.2, 0.1}},
      {EventKind::GazeAway, {-0.1, -0.05}},
      {EventKind::TouchRobot, {0.2, 0.15}},
      {EventKind::TaskResponseNone, {-0.1, -0.1}},
      {EventKind::UtteranceHeard, {0.0, 0.1}},
  };
  // decay = decay_base + decay_span * (1 - neuroticism)
  double decay_base = 0.1;
  double decay_span = 0.4;
  // rise gain = rise_base + rise_span * neuroticism
  double rise_base = 0.5;
  double rise_span = 0.5;
  double neutral_radius = 0.1;
  // baseline = gain * (extraversion - 0.5)
  double baseline_valence_gain = 0.4;
  double baseline_arousal_gain = 0.2;
  double adaptation_weight = 0.5;  // weight on the user's traits
  AdaptationDirection adaptation = AdaptationDirection::Similarity;
};

AffectConfig load_affect_config(const nlohmann::json& j, const std::string& source);
AffectConfig load_affect_config_file(const std::filesystem::path& file);

PersonalityProfile adapt_personality(const PersonalityProfile& user, const PersonalityProfile& base,
                                     const AffectConfig& config = {});

Appraisal appraise(const InteractionEvent& event, const AffectConfig& config = {});

double decay_rate(double neuroticism, const AffectConfig& config = {});
double rise_gain(double neuroticism, const AffectConfig& config = {});

/// Mood at rest for a given personality: baseline and decay rate filled in,
/// current point placed on the baseline.
MoodState resting_mood(const PersonalityProfile& personality, const AffectConfig& config = {});

/// One explicit-Euler step of decay toward baseline plus summed impulses.
MoodState step_mood(const MoodState& mood, std::span<const Appraisal> impulses, double rise_gain,
                    Tick dt);

EmotionState current_emotion(const MoodState& mood, const AffectConfig& config = {});

nlohmann::json to_json(const PersonalityProfile& p);
PersonalityProfile personality_from_json(const nlohmann::json& j, const std::string& source,
                                         const std::string& path = "$");

}  // namespace carebot
