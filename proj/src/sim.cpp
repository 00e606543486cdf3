#include "carebot/sim.hpp"

#include <algorithm>

#include "carebot/json_reader.hpp"

namespace carebot {

Persona load_persona(const nlohmann::json& j, const std::string& source) {
  JsonReader root(j, source);
  Persona p;
  p.id = root.at("id").string();
  if (root.has("base_engagement")) p.base_engagement = root.at("base_engagement").number_in(0, 1);
  if (root.has("decay")) p.decay = root.at("decay").number_in(0, 1);
  if (root.has("reengagement_response")) p.reengagement_response = root.at("reengagement_response").number_in(0, 1);
  if (root.has("response_accuracy")) p.response_accuracy = root.at("response_accuracy").number_in(0, 1);
  if (root.has("response_latency")) {
    p.response_latency = root.at("response_latency").integer();
    if (p.response_latency < 1) root.at("response_latency").fail("latency must be >= 1");
  }
  if (root.has("touch_probability")) p.touch_probability = root.at("touch_probability").number_in(0, 1);
  if (root.has("noise")) p.noise = root.at("noise").number_in(0, 1);
  if (root.has("gaze_confidence")) p.gaze_confidence = root.at("gaze_confidence").number_in(0, 1);
  if (root.has("task_confidence")) p.task_confidence = root.at("task_confidence").number_in(0, 1);
  return p;
}

Persona load_persona_file(const std::filesystem::path& file) {
  return load_persona(load_json_file(file), file.string());
}

SimulatedUser::SimulatedUser(Persona persona, std::uint64_t seed)
    : persona_(std::move(persona)), rng_(seed), engagement_(persona_.base_engagement) {}

std::vector<RawSensorRecord> SimulatedUser::sense(Tick now) {
  double e = engagement_ - persona_.decay + (cued_ ? persona_.reengagement_response : 0.0);
  if (persona_.noise > 0.0) e += rng_.uniform(-persona_.noise, persona_.noise);
  engagement_ = clamp01(e);
  cued_ = false;

  std::vector<RawSensorRecord> out;
  const bool looking = rng_.bernoulli(engagement_);
  out.push_back({now, Channel::Gaze, looking ? "robot" : "elsewhere", persona_.gaze_confidence});
  if (answer_due_ && answer_due_->first == now) {
    std::string payload;
    if (rng_.bernoulli(engagement_)) payload = rng_.bernoulli(persona_.response_accuracy) ? answer_due_->second : "wrong";
    out.push_back({now, Channel::TaskInput, payload, persona_.task_confidence});
    answer_due_.reset();
  }
  if (rng_.bernoulli(persona_.touch_probability * engagement_)) {
    out.push_back({now, Channel::Touch, "hand", persona_.gaze_confidence});
  }
  return out;
}

void SimulatedUser::observe(Tick now, const TickResult& result) {
  if (!result.script) return;
  for (const auto& tag : split_tags(result.script->tag)) {
    if (tag.starts_with("reengage_")) cued_ = true;
  }
  if (result.prompted_token) answer_due_ = {now + persona_.response_latency, *result.prompted_token};
}

std::vector<ScheduledCommand> load_command_script(const nlohmann::json& j, const std::string& source, Tick horizon) {
  JsonReader root(j, source);
  std::vector<ScheduledCommand> out;
  for (const auto& entry : root.at("commands").elements()) {
    const Tick first = entry.at("tick").integer();
    if (first < 0) entry.at("tick").fail("tick must be >= 0");
    SupervisionCommand cmd;
    try {
      cmd = command_from_json(entry.at("command").raw());
    } catch (const std::invalid_argument& e) {
      entry.at("command").fail(e.what());
    }
    const Tick every = entry.integer_or("every", 0);
    if (every < 0) entry.at("every").fail("every must be >= 0");
    if (every == 0) {
      out.push_back({first, cmd});
    } else {
      for (Tick t = first; t < horizon; t += every) out.push_back({t, cmd});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScheduledCommand& a, const ScheduledCommand& b) { return a.tick < b.tick; });
  return out;
}

std::vector<ScheduledCommand> load_command_script_file(const std::filesystem::path& file, Tick horizon) {
  return load_command_script(load_json_file(file), file.string(), horizon);
}

SimResult run_session(Controller& controller, SimulatedUser& user, const SimOptions& options) {
  if (!controller.started()) controller.start();
  SimResult result;
  double engagement_sum = 0.0;
  auto next = options.script.begin();
  for (Tick i = 0; i < options.ticks && !controller.stopped(); ++i) {
    const Tick now = controller.now();
    while (next != options.script.end() && next->tick <= now) controller.submit((next++)->command);
    const auto records = user.sense(now);
    auto out = controller.tick(records);
    user.observe(now, out);
    engagement_sum += out.record.engagement;
    ++result.ticks_run;
    if (out.script) result.scripts.push_back(std::move(*out.script));
    if (out.record.goal_reached) result.goal_reached = true;
    if (options.stop_on_goal && result.goal_reached) break;
  }
  if (result.ticks_run > 0) result.mean_engagement = engagement_sum / static_cast<double>(result.ticks_run);
  return result;
}

}  // namespace carebot
