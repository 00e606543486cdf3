#include "carebot/fusion.hpp"

#include <algorithm>
#include <array>
#include <cassert>

#include "carebot/json_reader.hpp"

namespace carebot {

const ActionUnit* AbstractBehavior::find_unit(std::string_view id) const {
  auto it = std::find_if(units.begin(), units.end(), [&](const ActionUnit& u) { return u.id == id; });
  return it == units.end() ? nullptr : &*it;
}

namespace {

void merge_limit(UnitLimit& into, const UnitLimit& from) {
  auto tighter = [](std::optional<double>& a, const std::optional<double>& b) {
    if (b && (!a || *b < *a)) a = b;
  };
  tighter(into.max_intensity, from.max_intensity);
  tighter(into.max_rate, from.max_rate);
}

}  // namespace

AbstractBehavior fuse(const std::optional<CandidateBehavior>& reactive,
                      const std::optional<CandidateBehavior>& deliberative,
                      const std::optional<CandidateBehavior>& emotional, Tick tick) {
  AbstractBehavior out;
  out.tick = tick;

  // Highest band first, so the first writer of a unit id is the winner.
  const std::array<const std::optional<CandidateBehavior>*, 3> ranked{&deliberative, &emotional, &reactive};
  std::map<std::string, ActionUnit> units;
  for (const auto* slot : ranked) {
    if (!*slot) continue;
    const auto& c = **slot;
    for (const auto& u : c.units) {
      auto [it, inserted] = units.try_emplace(u.id, u);
      if (inserted) {
        out.provenance[u.id] = c.source;
      } else {
        assert(band_ceiling(out.provenance[u.id]) > band_ceiling(c.source));
      }
    }
    for (const auto& [id, limit] : c.limits) merge_limit(out.limits[id], limit);
    out.tag += (out.tag.empty() ? "" : "+") + c.tag;
  }
  // A merged cap binds the winner too, whichever layer set it.
  for (auto& [id, u] : units) {
    if (auto it = out.limits.find(id); it != out.limits.end() && it->second.max_intensity) {
      u.intensity = std::min(u.intensity, *it->second.max_intensity);
    }
    out.units.push_back(std::move(u));
  }

  if (deliberative) out.speech = deliberative->speech;
  if (deliberative && deliberative->gaze_target) {
    out.gaze_target = deliberative->gaze_target;
  } else if (reactive) {
    out.gaze_target = reactive->gaze_target;
  }
  return out;
}

double speed_scale_for(double arousal) {
  return std::clamp(0.7 + 0.3 * (arousal + 1.0), 0.5, 1.5);
}

double amplitude_scale_for(double arousal, double extraversion) {
  return std::clamp(speed_scale_for(arousal) * (0.9 + 0.2 * extraversion), 0.5, 1.5);
}

AbstractBehavior modulate(AbstractBehavior behavior, const MoodState& mood, const PersonalityProfile& personality,
                          const std::map<std::string, double>& previous) {
  behavior.amplitude_scale = amplitude_scale_for(mood.arousal, personality.extraversion);
  behavior.speed_scale = speed_scale_for(mood.arousal);
  for (auto& u : behavior.units) {
    double v = clamp01(u.intensity * behavior.amplitude_scale);
    if (auto it = behavior.limits.find(u.id); it != behavior.limits.end()) {
      const auto& limit = it->second;
      if (limit.max_rate) {
        auto prev_it = previous.find(u.id);
        const double prev = prev_it == previous.end() ? 0.0 : prev_it->second;
        v = clamp01(std::clamp(v, prev - *limit.max_rate, prev + *limit.max_rate));
      }
      if (limit.max_intensity) v = std::min(v, *limit.max_intensity);
    }
    u.intensity = v;
  }
  return behavior;
}

CandidateBehavior as_candidate(const AbstractBehavior& behavior, Source source) {
  CandidateBehavior c;
  c.source = source;
  c.units = behavior.units;
  c.speech = behavior.speech;
  c.gaze_target = behavior.gaze_target;
  c.priority = band_ceiling(source);
  c.tag = behavior.tag;
  c.limits = behavior.limits;
  return c;
}

nlohmann::json to_json(const AbstractBehavior& b) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : b.units) units.push_back(to_json(u));
  nlohmann::json provenance = nlohmann::json::object();
  for (const auto& [id, s] : b.provenance) provenance[id] = to_string(s);
  nlohmann::json limits = nlohmann::json::object();
  for (const auto& [id, l] : b.limits) limits[id] = to_json(l);
  nlohmann::json j{{"tag", b.tag},
                   {"tick", b.tick},
                   {"units", units},
                   {"amplitude_scale", b.amplitude_scale},
                   {"speed_scale", b.speed_scale},
                   {"provenance", provenance},
                   {"limits", limits}};
  put_optional(j, "speech", b.speech);
  put_optional(j, "gaze_target", b.gaze_target);
  return j;
}

AbstractBehavior abstract_behavior_from_json(const nlohmann::json& j) {
  AbstractBehavior b;
  b.tag = j.value("tag", std::string{});
  b.tick = j.value("tick", Tick{0});
  for (const auto& u : j.at("units")) b.units.push_back(unit_from_json(u));
  normalize_units(b.units);
  b.amplitude_scale = j.value("amplitude_scale", 1.0);
  b.speed_scale = j.value("speed_scale", 1.0);
  if (j.contains("provenance")) {
    for (auto it = j["provenance"].begin(); it != j["provenance"].end(); ++it) {
      auto s = parse_source(it->get<std::string>());
      if (!s) throw std::invalid_argument("unknown provenance source");
      b.provenance[it.key()] = *s;
    }
  }
  if (j.contains("limits")) {
    for (auto it = j["limits"].begin(); it != j["limits"].end(); ++it) b.limits[it.key()] = limit_from_json(*it);
  }
  b.speech = get_optional<std::string>(j, "speech");
  b.gaze_target = get_optional<std::string>(j, "gaze_target");
  return b;
}

}  // namespace carebot
