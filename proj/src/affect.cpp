#include "carebot/affect.hpp"

#include <cmath>
#include <numbers>

#include "carebot/json_reader.hpp"

namespace carebot {

AffectConfig load_affect_config(const nlohmann::json& j, const std::string& source) {
  AffectConfig cfg;
  JsonReader root(j, source);
  if (auto table = root.find("appraisal")) {
    for (const auto& [name, entry] : table->members()) {
      auto kind = parse_event_kind(name);
      if (!kind) entry.fail("unknown event kind '" + name + "'");
      if (entry.size() != 2) entry.fail("expected [d_valence, d_arousal]");
      cfg.appraisal_table[*kind] = {entry.at(0).number_in(-1, 1), entry.at(1).number_in(-1, 1)};
    }
  }
  cfg.decay_base = root.number_or("decay_base", cfg.decay_base);
  cfg.decay_span = root.number_or("decay_span", cfg.decay_span);
  cfg.rise_base = root.number_or("rise_base", cfg.rise_base);
  cfg.rise_span = root.number_or("rise_span", cfg.rise_span);
  if (cfg.decay_base <= 0.0) root.at("decay_base").fail("decay_base must be > 0");
  if (cfg.decay_base + cfg.decay_span > 1.0) root.fail("decay_base + decay_span must be <= 1");
  if (root.has("neutral_radius")) cfg.neutral_radius = root.at("neutral_radius").number_in(0, 1);
  cfg.baseline_valence_gain = root.number_or("baseline_valence_gain", cfg.baseline_valence_gain);
  cfg.baseline_arousal_gain = root.number_or("baseline_arousal_gain", cfg.baseline_arousal_gain);
  if (root.has("adaptation_weight")) cfg.adaptation_weight = root.at("adaptation_weight").number_in(0, 1);
  if (auto dir = root.find("adaptation")) {
    const auto s = dir->string();
    if (s == "similarity") {
      cfg.adaptation = AdaptationDirection::Similarity;
    } else if (s == "complementarity") {
      cfg.adaptation = AdaptationDirection::Complementarity;
    } else {
      dir->fail("expected 'similarity' or 'complementarity'");
    }
  }
  return cfg;
}

AffectConfig load_affect_config_file(const std::filesystem::path& file) {
  return load_affect_config(load_json_file(file), file.string());
}

PersonalityProfile adapt_personality(const PersonalityProfile& user, const PersonalityProfile& base,
                                     const AffectConfig& config) {
  const double w = config.adaptation_weight;
  auto blend = [&](double u, double b) {
    const double target = config.adaptation == AdaptationDirection::Similarity ? u : 1.0 - u;
    return clamp01(w * target + (1.0 - w) * b);
  };
  return {
      blend(user.openness, base.openness),
      blend(user.conscientiousness, base.conscientiousness),
      blend(user.extraversion, base.extraversion),
      blend(user.agreeableness, base.agreeableness),
      blend(user.neuroticism, base.neuroticism),
  };
}

Appraisal appraise(const InteractionEvent& event, const AffectConfig& config) {
  Appraisal a{0.0, 0.0, event.kind};
  if (auto it = config.appraisal_table.find(event.kind); it != config.appraisal_table.end()) {
    a.d_valence = clamp_unit(it->second.first * event.confidence);
    a.d_arousal = clamp_unit(it->second.second * event.confidence);
  }
  return a;
}

double decay_rate(double neuroticism, const AffectConfig& config) {
  return config.decay_base + config.decay_span * (1.0 - clamp01(neuroticism));
}

double rise_gain(double neuroticism, const AffectConfig& config) {
  return config.rise_base + config.rise_span * clamp01(neuroticism);
}

MoodState resting_mood(const PersonalityProfile& personality, const AffectConfig& config) {
  MoodState m;
  m.baseline_valence = clamp_unit(config.baseline_valence_gain * (personality.extraversion - 0.5));
  m.baseline_arousal = clamp_unit(config.baseline_arousal_gain * (personality.extraversion - 0.5));
  m.valence = m.baseline_valence;
  m.arousal = m.baseline_arousal;
  m.decay_rate = decay_rate(personality.neuroticism, config);
  return m;
}

MoodState step_mood(const MoodState& mood, std::span<const Appraisal> impulses, double gain, Tick dt) {
  if (dt < 1) throw std::invalid_argument("step_mood: dt must be >= 1");
  double sum_v = 0.0, sum_a = 0.0;
  for (const auto& a : impulses) {
    sum_v += a.d_valence;
    sum_a += a.d_arousal;
  }
  const double k = static_cast<double>(dt) * mood.decay_rate;
  MoodState next = mood;
  next.valence = clamp_unit(mood.valence + k * (mood.baseline_valence - mood.valence) + gain * sum_v);
  next.arousal = clamp_unit(mood.arousal + k * (mood.baseline_arousal - mood.arousal) + gain * sum_a);
  return next;
}

EmotionState current_emotion(const MoodState& mood, const AffectConfig& config) {
  const double magnitude = std::hypot(mood.valence, mood.arousal);
  if (magnitude < config.neutral_radius) return {EmotionLabel::Neutral, 0.0};

  constexpr std::array<EmotionLabel, 8> kOctants{
      EmotionLabel::Pleasure,   EmotionLabel::Excitement, EmotionLabel::Arousal,
      EmotionLabel::Distress,   EmotionLabel::Misery,     EmotionLabel::Depression,
      EmotionLabel::Sleepiness, EmotionLabel::Contentment,
  };
  double degrees = std::atan2(mood.arousal, mood.valence) * 180.0 / std::numbers::pi;
  if (degrees < 0.0) degrees += 360.0;
  const auto sector = static_cast<std::size_t>(std::floor((degrees + 22.5) / 45.0)) % 8;
  return {kOctants[sector], std::min(1.0, magnitude)};
}

nlohmann::json to_json(const PersonalityProfile& p) {
  return {{"openness", p.openness},         {"conscientiousness", p.conscientiousness},
          {"extraversion", p.extraversion}, {"agreeableness", p.agreeableness},
          {"neuroticism", p.neuroticism}};
}

PersonalityProfile personality_from_json(const nlohmann::json& j, const std::string& source,
                                         const std::string& path) {
  JsonReader r(j, source, path);
  PersonalityProfile p;
  p.openness = r.at("openness").number_in(0, 1);
  p.conscientiousness = r.at("conscientiousness").number_in(0, 1);
  p.extraversion = r.at("extraversion").number_in(0, 1);
  p.agreeableness = r.at("agreeableness").number_in(0, 1);
  p.neuroticism = r.at("neuroticism").number_in(0, 1);
  return p;
}

}  // namespace carebot
