#include "carebot/layers.hpp"

#include <algorithm>
#include <cmath>

namespace carebot {

ReactiveState initial_reactive_state(Rng& rng, Tick start, const ReactiveConfig& config) {
  ReactiveState s;
  s.next_blink = start + rng.uniform_int(config.blink_interval_min, config.blink_interval_max);
  s.next_idle = start + rng.uniform_int(config.idle_interval_min, config.idle_interval_max);
  return s;
}

ReactiveOutput reactive_tick(std::span<const Stimulus> stimuli, Rng& rng, Tick tick,
                             const ReactiveState& state, const BehaviorLibrary& library,
                             const ReactiveConfig& config) {
  ReactiveOutput out;
  out.next = state;

  if (tick >= state.next_blink) {
    out.candidates.push_back(library.instantiate(library.blink_tag(), Source::Reactive, config.blink_priority));
    out.next.next_blink = tick + rng.uniform_int(config.blink_interval_min, config.blink_interval_max);
  }

  const Stimulus* best = nullptr;
  for (const auto& s : stimuli) {
    if (!best || s.salience > best->salience || (s.salience == best->salience && s.id < best->id)) {
      best = &s;
    }
  }
  if (best && best->salience >= config.gaze_threshold) {
    auto gaze = library.instantiate(library.gaze_shift_tag(), Source::Reactive, config.gaze_priority);
    for (auto& u : gaze.units) u.intensity = clamp01(u.intensity * best->salience);
    gaze.gaze_target = best->id;
    out.candidates.push_back(std::move(gaze));
  }

  if (tick >= state.next_idle) {
    out.candidates.push_back(library.instantiate(library.idle_tag(), Source::Reactive, config.idle_priority));
    out.next.next_idle = tick + rng.uniform_int(config.idle_interval_min, config.idle_interval_max);
  }
  return out;
}

std::optional<CandidateBehavior> merge_candidates(std::span<const CandidateBehavior> candidates) {
  if (candidates.empty()) return std::nullopt;
  if (candidates.size() == 1) return candidates.front();

  std::vector<const CandidateBehavior*> order;
  for (const auto& c : candidates) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->priority > b->priority; });

  CandidateBehavior merged;
  merged.source = order.front()->source;
  merged.priority = order.front()->priority;
  std::map<std::string, ActionUnit> units;
  for (const auto* c : order) {
    for (const auto& u : c->units) units.try_emplace(u.id, u);
    for (const auto& [id, limit] : c->limits) merged.limits.try_emplace(id, limit);
    if (!merged.speech && c->speech) merged.speech = c->speech;
    if (!merged.gaze_target && c->gaze_target) merged.gaze_target = c->gaze_target;
    merged.tag += (merged.tag.empty() ? "" : "+") + c->tag;
  }
  for (auto& [id, u] : units) merged.units.push_back(std::move(u));
  return merged;
}

double DriveLevel::deficit() const { return std::abs(level - setpoint); }

DriveState initial_drives(const DriveConfig& config) {
  DriveState s;
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    s.levels[i] = {config.setpoint[i], config.setpoint[i], config.drift[i]};
  }
  return s;
}

DriveState drive_step(const DriveState& drives, const std::map<Drive, double>& satisfactions, Tick dt) {
  if (dt < 1) throw std::invalid_argument("drive_step: dt must be >= 1");
  DriveState next = drives;
  for (Drive d : kDrives) {
    auto it = satisfactions.find(d);
    const double satisfaction = it == satisfactions.end() ? 0.0 : it->second;
    auto& lvl = next[d];
    lvl.level = clamp01(lvl.level + lvl.drift * static_cast<double>(dt) - satisfaction);
  }
  return next;
}

Drive max_deficit_drive(const DriveState& drives) {
  Drive best = kDrives.front();
  for (Drive d : kDrives) {
    if (drives[d].deficit() > drives[best].deficit()) best = d;
  }
  return best;
}

std::optional<DeliberativeChoice> select_deliberative(const DriveState& drives,
                                                      const std::optional<ScenarioAction>& scenario_action,
                                                      double engagement, const BehaviorLibrary& library,
                                                      const DeliberationConfig& config) {
  const Drive neediest = max_deficit_drive(drives);
  if (engagement < config.engage_threshold) {
    return DeliberativeChoice{
        library.instantiate(library.reengage_behavior(neediest), Source::Deliberative, kDeliberativePriority),
        DeliberativeReason::Reengage};
  }
  if (scenario_action) {
    return DeliberativeChoice{
        library.instantiate(scenario_action->behavior, Source::Deliberative, kDeliberativePriority),
        DeliberativeReason::Scenario};
  }
  if (drives[neediest].deficit() >= config.deficit_floor) {
    return DeliberativeChoice{
        library.instantiate(library.drive_behavior(neediest), Source::Deliberative, kDeliberativePriority),
        DeliberativeReason::Drive};
  }
  return std::nullopt;
}

std::optional<CandidateBehavior> express_emotion(const EmotionState& emotion, const BehaviorLibrary& library) {
  if (emotion.label == EmotionLabel::Neutral) return std::nullopt;
  const double intensity = clamp01(emotion.intensity);
  auto c = library.instantiate(library.expression_for(emotion.label), Source::Emotional,
                               band_ceiling(Source::Emotional) * intensity);
  for (auto& u : c.units) u.intensity = clamp01(u.intensity * intensity);
  return c;
}

}  // namespace carebot
