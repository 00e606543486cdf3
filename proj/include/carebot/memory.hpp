#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/affect.hpp"
#include "carebot/fusion.hpp"
#include "carebot/monitor.hpp"
#include "carebot/perception.hpp"
#include "carebot/supervision.hpp"

namespace carebot {

// ---------------------------------------------------------------------------
// User profiles

struct HistoryEntry {
  std::string session_id;
  std::string scenario_id;
  int final_difficulty = 0;
  bool goal_reached = false;
  double mean_engagement = 0.0;

  bool operator==(const HistoryEntry&) const = default;
};

struct UserProfile {
  std::string user_id;
  PersonalityProfile personality;
  std::map<std::string, std::string> preferences;
  std::vector<HistoryEntry> performance_history;  // append-only

  bool operator==(const UserProfile&) const = default;
};

UserProfile load_user_profile(const nlohmann::json& j, const std::string& source);
UserProfile load_user_profile_file(const std::filesystem::path& file);
nlohmann::json to_json(const UserProfile& p);

/// One JSON file per user under `<root>/profiles/`.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path path_for(const std::string& user_id) const;
  std::optional<UserProfile> load(const std::string& user_id) const;
  void save(const UserProfile& profile) const;

 private:
  std::filesystem::path root_;
};

// ---------------------------------------------------------------------------
// Session log

struct VerdictEntry {
  Source source = Source::Reactive;
  std::string tag;
  Outcome outcome = Outcome::Allow;
  std::vector<std::string> rules;

  bool operator==(const VerdictEntry&) const = default;
};

struct SupervisionEvent {
  SupervisionCommand command;
  bool accepted = false;
  std::string reason;

  bool operator==(const SupervisionEvent&) const = default;
};

/// How the deliberative part of an emitted behavior got there.
enum class DeliberativeOrigin { None, Autonomous, Approved, Override };

inline constexpr std::array<EnumName<DeliberativeOrigin>, 4> kOriginNames{{
    {DeliberativeOrigin::None, "none"},
    {DeliberativeOrigin::Autonomous, "autonomous"},
    {DeliberativeOrigin::Approved, "approved"},
    {DeliberativeOrigin::Override, "override"},
}};
inline std::string_view to_string(DeliberativeOrigin o) { return enum_to_string(o, kOriginNames); }

struct QueueEntry {
  std::int64_t id = 0;
  std::string tag;

  bool operator==(const QueueEntry&) const = default;
};

struct SessionRecord {
  Tick tick = 0;
  ControllerMode mode = ControllerMode::Autonomous;
  std::vector<RawSensorRecord> inputs;
  std::vector<std::string> rejected;
  std::vector<InteractionEvent> events;
  double engagement = 0.0;
  double valence = 0.0;
  double arousal = 0.0;
  EmotionLabel emotion = EmotionLabel::Neutral;
  double emotion_intensity = 0.0;
  std::array<double, 3> drives{};
  std::string scenario_state;
  std::map<std::string, std::int64_t> counters;
  int difficulty = 0;
  bool goal_reached = false;
  std::string behavior_tag;  // empty when nothing was emitted
  std::map<std::string, Source> provenance;
  std::vector<VerdictEntry> verdicts;
  std::vector<SupervisionEvent> supervision;
  std::optional<AbstractBehavior> behavior;
  bool emitted = false;
  DeliberativeOrigin origin = DeliberativeOrigin::None;
  std::optional<std::int64_t> approval_id;
  std::vector<QueueEntry> approval_queue;
  std::vector<std::string> errors;

  bool operator==(const SessionRecord&) const = default;
};

struct SessionHeader {
  int schema_version = 1;
  std::string session_id;
  std::string scenario_id;
  std::string scenario_file;
  std::string robot_id;
  std::string robot_file;
  std::string config_file;
  std::string persona_file;
  std::string user_id;
  PersonalityProfile user_personality;
  std::uint64_t seed = 0;
  ControllerMode initial_mode = ControllerMode::Autonomous;

  bool operator==(const SessionHeader&) const = default;
};

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The single canonical session log; both exports are projections of it.
class SessionLog {
 public:
  SessionLog() = default;
  explicit SessionLog(SessionHeader header) : header_(std::move(header)) {}

  /// Appends; ticks must be strictly increasing.
  void record(SessionRecord rec);

  const SessionHeader& header() const { return header_; }
  SessionHeader& header() { return header_; }
  const std::vector<SessionRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const SessionLog&) const = default;

 private:
  SessionHeader header_;
  std::vector<SessionRecord> records_;
};

enum class Audience { Therapist, Roboticist };

nlohmann::json to_json(const SessionHeader& h);
SessionHeader header_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SessionRecord& r);
SessionRecord session_record_from_json(const nlohmann::json& j);

/// Line-delimited: one header object, then one object per tick.
void export_roboticist(const SessionLog& log, std::ostream& out);
/// Comma-separated table with a fixed column order.
void export_therapist(const SessionLog& log, std::ostream& out);
void export_session(const SessionLog& log, Audience audience, const std::filesystem::path& file);

inline constexpr std::string_view kTherapistColumns = "tick,engagement,scenario_state,counters,goal_reached,difficulty";

SessionLog parse_roboticist(std::istream& in);
SessionLog load_roboticist_file(const std::filesystem::path& file);

/// Writes to a sibling temp file and renames, so readers never see a partial file.
void write_file_atomically(const std::filesystem::path& file, const std::string& content);

struct SessionSummary {
  std::string session_id;
  std::string scenario_id;
  int final_difficulty = 0;
  bool goal_reached = false;
  double mean_engagement = 0.0;
};

SessionSummary summarize(const SessionLog& log);

UserProfile update_history(UserProfile profile, const SessionSummary& summary);

}  // namespace carebot
