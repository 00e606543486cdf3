#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/config.hpp"
#include "carebot/fusion.hpp"
#include "carebot/memory.hpp"
#include "carebot/motion.hpp"
#include "carebot/rng.hpp"
#include "carebot/supervision.hpp"

namespace carebot {

/// Thread-safe FIFO between the supervision transport and the control loop.
class CommandInbox {
 public:
  void push(SupervisionCommand command);
  std::vector<SupervisionCommand> drain();

 private:
  std::mutex mutex_;
  std::deque<SupervisionCommand> queue_;
};

struct SessionSetup {
  std::string session_id = "session";
  std::string scenario_id;
  ControllerMode mode = ControllerMode::Autonomous;
  std::uint64_t seed = 0;
  std::optional<UserProfile> user;
  std::string robot_file;
  std::string persona_file;
};

struct TickResult {
  std::optional<MotionScript> script;
  SessionRecord record;
  std::vector<Acknowledgment> acks;
  /// Token the user is now expected to answer with, when a prompt went out.
  std::optional<std::string> prompted_token;
};

/// Runs one supervised session: perception, affect, the three behavior
/// layers, vetting, fusion, modulation and motion mapping, once per tick.
class Controller {
 public:
  Controller(std::shared_ptr<const ControllerConfig> config, ScenarioCatalog catalog, RobotMorphology robot,
             SessionSetup setup);

  /// Safe to call from any thread; applied at the next tick boundary.
  void submit(SupervisionCommand command);

  /// Applies queued commands without ticking (before the session starts).
  std::vector<Acknowledgment> poll();

  /// Starts the session directly, as an accepted `start` command would.
  void start();

  /// Processes one tick. `inputs` must all carry the current tick.
  TickResult tick(std::span<const RawSensorRecord> inputs);

  bool started() const { return started_; }
  bool stopped() const { return mode_ == ControllerMode::Stopped; }
  ControllerMode mode() const { return mode_; }
  Tick now() const { return now_; }
  const SessionLog& log() const { return log_; }
  const Scenario& scenario() const;
  const ScenarioState& scenario_state() const { return scenario_state_; }
  const MoodState& mood() const { return mood_; }
  const PersonalityProfile& personality() const { return personality_; }
  const RobotMorphology& robot() const { return robot_; }
  const ControllerConfig& config() const { return *config_; }
  const std::vector<QueueEntry>& approval_queue() const { return queue_; }
  const std::string& scenario_id() const { return scenario_id_; }
  std::vector<std::string> scenario_ids() const;

 private:
  struct Staged {
    std::string tag;
    DeliberativeOrigin origin = DeliberativeOrigin::Override;
    std::optional<std::int64_t> approval_id;
  };

  Acknowledgment handle(const SupervisionCommand& command);
  void begin();
  std::optional<MotionScript> run_layers(SessionRecord& rec, const EmotionState& emotion, double engagement,
                                         std::span<const InteractionEvent> events,
                                         std::optional<std::string>& prompted);
  std::optional<CandidateBehavior> vetted(const std::optional<CandidateBehavior>& candidate,
                                         SessionRecord& rec) const;

  std::shared_ptr<const ControllerConfig> config_;
  ScenarioCatalog catalog_;
  RobotMorphology robot_;
  SessionSetup setup_;
  CommandInbox inbox_;
  SessionLog log_;

  bool started_ = false;
  ControllerMode mode_ = ControllerMode::Autonomous;
  ControllerMode resume_mode_ = ControllerMode::Autonomous;
  bool stop_requested_ = false;
  Tick now_ = 0;
  std::string scenario_id_;

  Rng rng_;
  PerceptionConfig perception_;
  DeliberationConfig deliberation_;
  PersonalityProfile personality_;
  MoodState mood_;
  DriveState drives_;
  ReactiveState reactive_;
  ScenarioState scenario_state_;
  std::vector<InteractionEvent> history_;
  std::deque<int> performance_;  // 1 = correct, per scored response
  std::map<Drive, double> satisfaction_;
  std::map<std::string, double> previous_intensities_;
  Tick deliberative_busy_until_ = 0;

  std::vector<QueueEntry> queue_;
  std::int64_t next_queue_id_ = 1;
  std::deque<Staged> staged_;
};

/// JSON view of one tick for the supervision interface.
nlohmann::json snapshot_json(const SessionRecord& record, const Controller& controller);

struct ReplayReport {
  std::size_t ticks = 0;
  std::vector<Tick> mismatches;  // ticks whose behavior tag differed

  bool ok() const { return mismatches.empty(); }
};

/// Rebuilds a controller from the files named in the log header and re-drives
/// it with the logged inputs and commands.
ReplayReport replay_session(const SessionLog& log);

}  // namespace carebot
