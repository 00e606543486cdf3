#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/controller.hpp"
#include "carebot/rng.hpp"

namespace carebot {

/// Parameters of a simulated user.
struct Persona {
  std::string id;
  double base_engagement = 0.8;
  double decay = 0.0;                  // engagement lost per tick
  double reengagement_response = 0.0;  // engagement gained per re-engagement cue
  double response_accuracy = 0.8;
  Tick response_latency = 3;           // ticks from prompt to answer
  double touch_probability = 0.0;      // per tick, scaled by engagement
  double noise = 0.0;                  // engagement jitter amplitude
  double gaze_confidence = 0.9;
  double task_confidence = 0.9;

  bool operator==(const Persona&) const = default;
};

Persona load_persona(const nlohmann::json& j, const std::string& source);
Persona load_persona_file(const std::filesystem::path& file);

/// Seeded closed-loop user model. Each tick it turns the robot's previous
/// output into raw sensor records the controller then perceives.
class SimulatedUser {
 public:
  SimulatedUser(Persona persona, std::uint64_t seed);

  /// Records for tick `now`.
  std::vector<RawSensorRecord> sense(Tick now);
  /// Feeds back what the robot did on tick `now`.
  void observe(Tick now, const TickResult& result);

  double engagement() const { return engagement_; }
  const Persona& persona() const { return persona_; }

 private:
  Persona persona_;
  Rng rng_;
  double engagement_;
  bool cued_ = false;
  std::optional<std::pair<Tick, std::string>> answer_due_;
};

struct ScheduledCommand {
  Tick tick = 0;
  SupervisionCommand command;
};

/// Loads `{"commands": [{tick, every?, command}]}`; `every` repeats the
/// command until `horizon`.
std::vector<ScheduledCommand> load_command_script(const nlohmann::json& j, const std::string& source, Tick horizon);
std::vector<ScheduledCommand> load_command_script_file(const std::filesystem::path& file, Tick horizon);

struct SimOptions {
  Tick ticks = 1000;
  bool stop_on_goal = false;
  std::vector<ScheduledCommand> script;  // submitted before their tick
};

struct SimResult {
  std::vector<MotionScript> scripts;
  double mean_engagement = 0.0;  // mean of the controller's estimate
  Tick ticks_run = 0;
  bool goal_reached = false;
};

SimResult run_session(Controller& controller, SimulatedUser& user, const SimOptions& options);

/// Seed of the simulated user's stream for a session seed.
inline std::uint64_t persona_seed(std::uint64_t seed) { return derive_seed(seed, 1); }

}  // namespace carebot
