#include "carebot/controller.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace carebot {

void CommandInbox::push(SupervisionCommand command) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(command));
}

std::vector<SupervisionCommand> CommandInbox::drain() {
  std::lock_guard lock(mutex_);
  std::vector<SupervisionCommand> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

Controller::Controller(std::shared_ptr<const ControllerConfig> config, ScenarioCatalog catalog,
                       RobotMorphology robot, SessionSetup setup)
    : config_(std::move(config)),
      catalog_(std::move(catalog)),
      robot_(std::move(robot)),
      setup_(std::move(setup)),
      mode_(setup_.mode),
      resume_mode_(setup_.mode),
      scenario_id_(setup_.scenario_id),
      rng_(derive_seed(setup_.seed, 0)) {
  if (!config_) throw std::invalid_argument("controller needs a config");
  if (!is_operating_mode(mode_)) throw std::invalid_argument("initial mode must be an operating mode");
  if (!scenario_id_.empty() && !catalog_.contains(scenario_id_)) {
    throw std::invalid_argument("unknown scenario '" + scenario_id_ + "'");
  }
  personality_ = setup_.user ? adapt_personality(setup_.user->personality, config_->robot_personality, config_->affect)
                             : config_->robot_personality;
  mood_ = resting_mood(personality_, config_->affect);
  drives_ = initial_drives(config_->drives);
}

const Scenario& Controller::scenario() const {
  auto it = catalog_.find(scenario_id_);
  if (it == catalog_.end()) throw std::logic_error("no scenario selected");
  return it->second.scenario;
}

std::vector<std::string> Controller::scenario_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : catalog_) ids.push_back(id);
  return ids;
}

void Controller::submit(SupervisionCommand command) { inbox_.push(std::move(command)); }

std::vector<Acknowledgment> Controller::poll() {
  std::vector<Acknowledgment> acks;
  for (const auto& c : inbox_.drain()) acks.push_back(handle(c));
  return acks;
}

void Controller::start() {
  if (started_) throw std::logic_error("session already started");
  if (mode_ == ControllerMode::Stopped) throw std::logic_error("session stopped");
  begin();
}

void Controller::begin() {
  const auto& entry = catalog_.at(scenario_id_);
  const auto& sc = entry.scenario;
  started_ = true;

  perception_ = config_->perception;
  if (!sc.perception_overrides.is_null()) apply_perception_overrides(perception_, sc.perception_overrides, entry.file);
  deliberation_ = config_->deliberation;
  if (sc.engage_threshold) deliberation_.engage_threshold = *sc.engage_threshold;

  scenario_state_ = initial_state(sc, now_);
  reactive_ = initial_reactive_state(rng_, now_, config_->reactive);

  SessionHeader h;
  h.session_id = setup_.session_id;
  h.scenario_id = scenario_id_;
  h.scenario_file = entry.file;
  h.robot_id = robot_.robot_id;
  h.robot_file = setup_.robot_file;
  h.config_file = config_->file;
  h.persona_file = setup_.persona_file;
  if (setup_.user) {
    h.user_id = setup_.user->user_id;
    h.user_personality = setup_.user->personality;
  }
  h.seed = setup_.seed;
  h.initial_mode = mode_;
  log_ = SessionLog(std::move(h));
}

Acknowledgment Controller::handle(const SupervisionCommand& c) {
  Acknowledgment ack{c.correlation_id, c.kind, false, "", now_};
  auto reject = [&](std::string reason) {
    ack.reason = std::move(reason);
    return ack;
  };
  auto accept = [&]() {
    ack.accepted = true;
    return ack;
  };
  if (mode_ == ControllerMode::Stopped || stop_requested_) return reject("session stopped");

  switch (c.kind) {
    case CommandKind::SelectScenario:
      if (started_) return reject("session already started");
      if (!c.scenario_id || !catalog_.contains(*c.scenario_id)) return reject("unknown scenario");
      scenario_id_ = *c.scenario_id;
      return accept();

    case CommandKind::Start:
      if (started_) return reject("session already started");
      if (scenario_id_.empty()) return reject("no scenario selected");
      begin();
      return accept();

    case CommandKind::Pause:
      if (!started_) return reject("session not started");
      if (!is_operating_mode(mode_)) return reject("not running");
      resume_mode_ = mode_;
      mode_ = ControllerMode::Paused;
      return accept();

    case CommandKind::Resume:
      if (mode_ != ControllerMode::Paused) return reject("not paused");
      mode_ = resume_mode_;
      return accept();

    case CommandKind::Stop:
      if (started_) {
        stop_requested_ = true;
      } else {
        mode_ = ControllerMode::Stopped;
      }
      return accept();

    case CommandKind::SetMode: {
      if (!c.mode || !is_operating_mode(*c.mode)) return reject("mode must be autonomous, approval or wizard_of_oz");
      ControllerMode& target = mode_ == ControllerMode::Paused ? resume_mode_ : mode_;
      if (target == ControllerMode::Approval && *c.mode != ControllerMode::Approval) queue_.clear();
      target = *c.mode;
      return accept();
    }

    case CommandKind::Approve:
    case CommandKind::Deny: {
      if (mode_ != ControllerMode::Approval) return reject("not in approval mode");
      auto it = std::find_if(queue_.begin(), queue_.end(),
                             [&](const QueueEntry& q) { return c.behavior_id && q.id == *c.behavior_id; });
      if (it == queue_.end()) return reject("no pending behavior with that id");
      if (c.kind == CommandKind::Approve) staged_.push_back({it->tag, DeliberativeOrigin::Approved, it->id});
      queue_.erase(it);
      return accept();
    }

    case CommandKind::OverrideBehavior:
      if (!started_) return reject("session not started");
      if (mode_ == ControllerMode::Paused) return reject("paused");
      if (!c.tag || !config_->library.contains(*c.tag)) return reject("unknown behavior");
      staged_.push_back({*c.tag, DeliberativeOrigin::Override, std::nullopt});
      return accept();

    case CommandKind::SetDifficulty: {
      if (!started_) return reject("session not started");
      const int top = static_cast<int>(scenario().levels.size()) - 1;
      if (!c.level || *c.level < 0 || *c.level > top) return reject("level out of range");
      scenario_state_ = set_difficulty(scenario_state_, scenario(), *c.level, now_);
      return accept();
    }
  }
  return reject("unhandled command");
}

std::optional<CandidateBehavior> Controller::vetted(const std::optional<CandidateBehavior>& candidate,
                                                    SessionRecord& rec) const {
  if (!candidate) return std::nullopt;
  auto v = vet(*candidate, config_->rules.rules());
  rec.verdicts.push_back({candidate->source, candidate->tag, v.outcome, v.reasons});
  if (v.outcome == Outcome::Veto) return std::nullopt;
  return v.modified ? std::move(v.modified) : candidate;
}

std::optional<MotionScript> Controller::run_layers(SessionRecord& rec, const EmotionState& emotion,
                                                   double engagement, std::span<const InteractionEvent> events,
                                                   std::optional<std::string>& prompted) {
  const auto& lib = config_->library;
  const bool layers_on = mode_ == ControllerMode::Autonomous || mode_ == ControllerMode::Approval;

  std::optional<CandidateBehavior> reactive, emotional, deliberative;
  DeliberativeOrigin origin = DeliberativeOrigin::None;
  std::optional<std::int64_t> approval_id;

  if (layers_on) {
    std::vector<Stimulus> stimuli;
    for (const auto& e : events) {
      if (e.kind == EventKind::GazeOnRobot) stimuli.push_back({"user_face", e.confidence});
      if (e.kind == EventKind::TouchRobot) stimuli.push_back({"user_touch", e.confidence});
      if (e.kind == EventKind::UtteranceHeard) stimuli.push_back({"user_voice", e.confidence});
    }
    auto out = reactive_tick(stimuli, rng_, now_, reactive_, lib, config_->reactive);
    reactive_ = out.next;
    reactive = vetted(merge_candidates(out.candidates), rec);
    emotional = vetted(express_emotion(emotion, lib), rec);
  }

  if (!staged_.empty()) {
    auto s = staged_.front();
    staged_.pop_front();
    deliberative = vetted(lib.instantiate(s.tag, Source::Deliberative, kDeliberativePriority), rec);
    origin = s.origin;
    approval_id = s.approval_id;
  } else if (layers_on && now_ >= deliberative_busy_until_) {
    const auto action = due_action(scenario_state_, now_);
    if (auto choice = select_deliberative(drives_, action, engagement, lib, deliberation_)) {
      auto v = vetted(choice->behavior, rec);
      if (v && mode_ == ControllerMode::Approval) {
        const bool queued = std::any_of(queue_.begin(), queue_.end(), [&](const QueueEntry& q) { return q.tag == v->tag; });
        if (!queued) queue_.push_back({next_queue_id_++, v->tag});
      } else if (v) {
        deliberative = std::move(v);
        origin = DeliberativeOrigin::Autonomous;
      }
    }
  }
  if (!deliberative) origin = DeliberativeOrigin::None;

  auto behavior = modulate(fuse(reactive, deliberative, emotional, now_), mood_, personality_, previous_intensities_);
  previous_intensities_.clear();
  if (behavior.empty()) return std::nullopt;

  auto script = map_behavior(behavior, robot_);
  for (const auto& u : behavior.units) previous_intensities_[u.id] = u.intensity;
  satisfaction_ = lib.satisfactions_of(behavior.tag);

  if (deliberative) {
    Tick longest = 1;
    for (const auto& u : deliberative->units) longest = std::max(longest, u.duration);
    deliberative_busy_until_ = now_ + longest;
    const auto& pending = scenario_state_.pending;
    if (pending && pending->behavior == deliberative->tag) {
      prompted = pending->expected_token;
      scenario_state_ = mark_action_issued(scenario_state_, scenario(), now_);
    }
  }

  rec.behavior_tag = behavior.tag;
  rec.provenance = behavior.provenance;
  rec.origin = origin;
  rec.approval_id = approval_id;
  rec.emitted = true;
  rec.behavior = std::move(behavior);
  return script;
}

TickResult Controller::tick(std::span<const RawSensorRecord> inputs) {
  if (!started_) throw std::logic_error("session not started");
  if (mode_ == ControllerMode::Stopped) throw std::logic_error("session stopped");

  TickResult out;
  SessionRecord& rec = out.record;
  rec.tick = now_;
  for (const auto& c : inbox_.drain()) {
    auto ack = handle(c);
    rec.supervision.push_back({c, ack.accepted, ack.reason});
    out.acks.push_back(std::move(ack));
  }

  // Perception
  std::optional<std::string> expected;
  if (scenario_state_.pending) expected = scenario_state_.pending->expected_token;
  for (const auto& r : inputs) {
    rec.inputs.push_back(r);
    if (r.tick != now_) {
      rec.rejected.push_back("record for tick " + std::to_string(r.tick) + " delivered at tick " + std::to_string(now_));
      continue;
    }
    if (auto ev = interpret(r, expected, perception_)) rec.events.push_back(*ev);
  }
  history_.insert(history_.end(), rec.events.begin(), rec.events.end());
  const Tick horizon = now_ - perception_.window_ticks;
  std::erase_if(history_, [&](const InteractionEvent& e) { return e.tick <= horizon; });
  rec.engagement = estimate_engagement(history_, now_, perception_.window_ticks, perception_).value;

  // Affect, drives, scenario: frozen while paused.
  const bool frozen = mode_ == ControllerMode::Paused || stop_requested_;
  if (!frozen) {
    std::vector<Appraisal> impulses;
    for (const auto& e : rec.events) impulses.push_back(appraise(e, config_->affect));
    mood_ = step_mood(mood_, impulses, rise_gain(personality_.neuroticism, config_->affect), 1);
    drives_ = drive_step(drives_, satisfaction_, 1);

    const auto& sc = scenario();
    for (const auto& e : rec.events) {
      scenario_state_ = advance(scenario_state_, sc, e, rec.engagement, now_);
      if (is_task_response(e.kind)) {
        performance_.push_back(e.kind == EventKind::TaskResponseCorrect ? 1 : 0);
        if (performance_.size() > config_->difficulty.window_events) performance_.pop_front();
      }
    }
    if (performance_.size() >= config_->difficulty.window_events) {
      const double rate = std::accumulate(performance_.begin(), performance_.end(), 0.0) /
                          static_cast<double>(performance_.size());
      scenario_state_ = adjust_difficulty(scenario_state_, sc, rate, now_, config_->difficulty);
    }
  }
  satisfaction_.clear();
  const auto emotion = current_emotion(mood_, config_->affect);

  // Behavior
  if (stop_requested_) {
    out.script = neutral_pose_script(robot_);
    rec.behavior_tag = out.script->tag;
    rec.emitted = true;
    stop_requested_ = false;
    mode_ = ControllerMode::Stopped;
    previous_intensities_.clear();
    staged_.clear();
    queue_.clear();
  } else if (mode_ != ControllerMode::Paused) {
    try {
      out.script = run_layers(rec, emotion, rec.engagement, rec.events, out.prompted_token);
    } catch (const std::exception& e) {
      rec.errors.push_back(e.what());
      out.script.reset();
      out.prompted_token.reset();
      rec.behavior.reset();
      rec.behavior_tag.clear();
      rec.provenance.clear();
      rec.emitted = false;
      rec.origin = DeliberativeOrigin::None;
      rec.approval_id.reset();
      previous_intensities_.clear();
    }
  }

  rec.mode = mode_;
  rec.valence = mood_.valence;
  rec.arousal = mood_.arousal;
  rec.emotion = emotion.label;
  rec.emotion_intensity = emotion.intensity;
  for (Drive d : kDrives) rec.drives[static_cast<std::size_t>(d)] = drives_[d].level;
  rec.scenario_state = scenario_state_.current;
  rec.counters = scenario_state_.counters;
  rec.difficulty = scenario_state_.difficulty;
  rec.goal_reached = scenario_state_.goal_reached;
  rec.approval_queue = queue_;

  log_.record(rec);
  ++now_;
  return out;
}

nlohmann::json snapshot_json(const SessionRecord& record, const Controller& controller) {
  const auto full = to_json(record);
  nlohmann::json j = nlohmann::json::object();
  for (const char* key : {"tick", "mode", "engagement", "mood", "emotion", "drives", "scenario", "behavior_tag",
                          "provenance", "approval_queue", "errors"}) {
    j[key] = full.at(key);
  }
  j["scenario"]["id"] = controller.scenario_id();
  j["robot_id"] = controller.robot().robot_id;
  return j;
}

ReplayReport replay_session(const SessionLog& log) {
  const auto& h = log.header();
  auto config = std::make_shared<const ControllerConfig>(load_controller_config(h.config_file));
  ScenarioCatalog catalog;
  auto entry = load_scenario_entry(h.scenario_file, config->library);
  const auto id = entry.scenario.id;
  catalog.emplace(id, std::move(entry));

  SessionSetup setup;
  setup.session_id = h.session_id;
  setup.scenario_id = id;
  setup.mode = h.initial_mode;
  setup.seed = h.seed;
  setup.robot_file = h.robot_file;
  setup.persona_file = h.persona_file;
  if (!h.user_id.empty()) setup.user = UserProfile{h.user_id, h.user_personality, {}, {}};

  Controller controller(config, std::move(catalog), load_morphology_file(h.robot_file), setup);
  controller.start();

  ReplayReport report;
  for (const auto& rec : log.records()) {
    ++report.ticks;
    if (controller.stopped() || controller.now() != rec.tick) {
      report.mismatches.push_back(rec.tick);
      continue;
    }
    for (const auto& s : rec.supervision) controller.submit(s.command);
    const auto result = controller.tick(rec.inputs);
    if (result.record.behavior_tag != rec.behavior_tag) report.mismatches.push_back(rec.tick);
  }
  return report;
}

}  // namespace carebot
