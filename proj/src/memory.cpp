#include "carebot/memory.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "carebot/json_reader.hpp"

namespace carebot {

// ---------------------------------------------------------------------------
// Profiles

UserProfile load_user_profile(const nlohmann::json& j, const std::string& source) {
  JsonReader root(j, source);
  UserProfile p;
  p.user_id = root.at("user_id").string();
  if (p.user_id.empty()) root.at("user_id").fail("user_id must be non-empty");
  p.personality = personality_from_json(root.at("personality").raw(), source, "$.personality");
  if (auto prefs = root.find("preferences")) {
    for (const auto& [k, v] : prefs->members()) p.preferences[k] = v.string();
  }
  if (auto hist = root.find("performance_history")) {
    for (const auto& h : hist->elements()) {
      HistoryEntry e;
      e.session_id = h.at("session_id").string();
      e.scenario_id = h.at("scenario_id").string();
      e.final_difficulty = static_cast<int>(h.at("final_difficulty").integer());
      e.goal_reached = h.at("goal_reached").boolean();
      e.mean_engagement = h.at("mean_engagement").number_in(0, 1);
      p.performance_history.push_back(std::move(e));
    }
  }
  return p;
}

UserProfile load_user_profile_file(const std::filesystem::path& file) {
  return load_user_profile(load_json_file(file), file.string());
}

nlohmann::json to_json(const UserProfile& p) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : p.performance_history) {
    hist.push_back({{"session_id", h.session_id},
                    {"scenario_id", h.scenario_id},
                    {"final_difficulty", h.final_difficulty},
                    {"goal_reached", h.goal_reached},
                    {"mean_engagement", h.mean_engagement}});
  }
  return {{"user_id", p.user_id},
          {"personality", to_json(p.personality)},
          {"preferences", p.preferences},
          {"performance_history", hist}};
}

std::filesystem::path ProfileStore::path_for(const std::string& user_id) const {
  return root_ / "profiles" / (user_id + ".json");
}

std::optional<UserProfile> ProfileStore::load(const std::string& user_id) const {
  const auto file = path_for(user_id);
  if (!std::filesystem::exists(file)) return std::nullopt;
  return load_user_profile_file(file);
}

void ProfileStore::save(const UserProfile& profile) const {
  const auto file = path_for(profile.user_id);
  std::filesystem::create_directories(file.parent_path());
  write_file_atomically(file, to_json(profile).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Log

void SessionLog::record(SessionRecord rec) {
  if (!records_.empty() && rec.tick <= records_.back().tick) {
    throw LogError("non-monotone tick " + std::to_string(rec.tick) + " after " +
                   std::to_string(records_.back().tick));
  }
  records_.push_back(std::move(rec));
}

nlohmann::json to_json(const SessionHeader& h) {
  return {{"type", "session"},
          {"schema_version", h.schema_version},
          {"session_id", h.session_id},
          {"scenario_id", h.scenario_id},
          {"scenario_file", h.scenario_file},
          {"robot_id", h.robot_id},
          {"robot_file", h.robot_file},
          {"config_file", h.config_file},
          {"persona_file", h.persona_file},
          {"user_id", h.user_id},
          {"user_personality", to_json(h.user_personality)},
          {"seed", h.seed},
          {"initial_mode", to_string(h.initial_mode)}};
}

SessionHeader header_from_json(const nlohmann::json& j) {
  SessionHeader h;
  h.schema_version = j.at("schema_version").get<int>();
  h.session_id = j.at("session_id").get<std::string>();
  h.scenario_id = j.at("scenario_id").get<std::string>();
  h.scenario_file = j.at("scenario_file").get<std::string>();
  h.robot_id = j.at("robot_id").get<std::string>();
  h.robot_file = j.at("robot_file").get<std::string>();
  h.config_file = j.at("config_file").get<std::string>();
  h.persona_file = j.at("persona_file").get<std::string>();
  h.user_id = j.at("user_id").get<std::string>();
  h.user_personality = personality_from_json(j.at("user_personality"), "log header");
  h.seed = j.at("seed").get<std::uint64_t>();
  auto mode = parse_mode(j.at("initial_mode").get<std::string>());
  if (!mode) throw LogError("unknown initial mode");
  h.initial_mode = *mode;
  return h;
}

nlohmann::json to_json(const SessionRecord& r) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& in : r.inputs) inputs.push_back(to_json(in));
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  nlohmann::json provenance = nlohmann::json::object();
  for (const auto& [id, s] : r.provenance) provenance[id] = to_string(s);
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back(
        {{"source", to_string(v.source)}, {"tag", v.tag}, {"outcome", to_string(v.outcome)}, {"rules", v.rules}});
  }
  nlohmann::json supervision = nlohmann::json::array();
  for (const auto& s : r.supervision) {
    supervision.push_back({{"command", to_json(s.command)}, {"accepted", s.accepted}, {"reason", s.reason}});
  }
  nlohmann::json queue = nlohmann::json::array();
  for (const auto& q : r.approval_queue) queue.push_back({{"id", q.id}, {"tag", q.tag}});

  nlohmann::json j{{"type", "tick"},
                   {"tick", r.tick},
                   {"mode", to_string(r.mode)},
                   {"inputs", inputs},
                   {"rejected", r.rejected},
                   {"events", events},
                   {"engagement", r.engagement},
                   {"mood", {{"valence", r.valence}, {"arousal", r.arousal}}},
                   {"emotion", {{"label", to_string(r.emotion)}, {"intensity", r.emotion_intensity}}},
                   {"drives",
                    {{"social_contact", r.drives[0]}, {"task_progress", r.drives[1]}, {"rest", r.drives[2]}}},
                   {"scenario", {{"state", r.scenario_state},
                                 {"counters", r.counters},
                                 {"difficulty", r.difficulty},
                                 {"goal_reached", r.goal_reached}}},
                   {"behavior_tag", r.behavior_tag},
                   {"provenance", provenance},
                   {"verdicts", verdicts},
                   {"supervision", supervision},
                   {"behavior", r.behavior ? to_json(*r.behavior) : nlohmann::json(nullptr)},
                   {"emitted", r.emitted},
                   {"origin", to_string(r.origin)},
                   {"approval_queue", queue},
                   {"errors", r.errors}};
  put_optional(j, "approval_id", r.approval_id);
  return j;
}

SessionRecord session_record_from_json(const nlohmann::json& j) {
  SessionRecord r;
  r.tick = j.at("tick").get<Tick>();
  auto mode = parse_mode(j.at("mode").get<std::string>());
  if (!mode) throw LogError("unknown mode");
  r.mode = *mode;
  for (const auto& in : j.at("inputs")) r.inputs.push_back(record_from_json(in));
  r.rejected = j.at("rejected").get<std::vector<std::string>>();
  for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
  r.engagement = j.at("engagement").get<double>();
  r.valence = j.at("mood").at("valence").get<double>();
  r.arousal = j.at("mood").at("arousal").get<double>();
  auto label = parse_emotion(j.at("emotion").at("label").get<std::string>());
  if (!label) throw LogError("unknown emotion label");
  r.emotion = *label;
  r.emotion_intensity = j.at("emotion").at("intensity").get<double>();
  const auto& d = j.at("drives");
  r.drives = {d.at("social_contact").get<double>(), d.at("task_progress").get<double>(), d.at("rest").get<double>()};
  const auto& sc = j.at("scenario");
  r.scenario_state = sc.at("state").get<std::string>();
  r.counters = sc.at("counters").get<std::map<std::string, std::int64_t>>();
  r.difficulty = sc.at("difficulty").get<int>();
  r.goal_reached = sc.at("goal_reached").get<bool>();
  r.behavior_tag = j.at("behavior_tag").get<std::string>();
  for (auto it = j.at("provenance").begin(); it != j.at("provenance").end(); ++it) {
    r.provenance[it.key()] = parse_source(it->get<std::string>()).value();
  }
  for (const auto& v : j.at("verdicts")) {
    VerdictEntry e;
    e.source = parse_source(v.at("source").get<std::string>()).value();
    e.tag = v.at("tag").get<std::string>();
    e.outcome = parse_outcome(v.at("outcome").get<std::string>()).value();
    e.rules = v.at("rules").get<std::vector<std::string>>();
    r.verdicts.push_back(std::move(e));
  }
  for (const auto& s : j.at("supervision")) {
    r.supervision.push_back(
        {command_from_json(s.at("command")), s.at("accepted").get<bool>(), s.at("reason").get<std::string>()});
  }
  if (!j.at("behavior").is_null()) r.behavior = abstract_behavior_from_json(j["behavior"]);
  r.emitted = j.at("emitted").get<bool>();
  r.origin = enum_from_string(j.at("origin").get<std::string>(), kOriginNames).value();
  for (const auto& q : j.at("approval_queue")) r.approval_queue.push_back({q.at("id").get<std::int64_t>(), q.at("tag").get<std::string>()});
  r.errors = j.at("errors").get<std::vector<std::string>>();
  r.approval_id = get_optional<std::int64_t>(j, "approval_id");
  return r;
}

void export_roboticist(const SessionLog& log, std::ostream& out) {
  out << to_json(log.header()).dump() << '\n';
  for (const auto& r : log.records()) out << to_json(r).dump() << '\n';
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void export_therapist(const SessionLog& log, std::ostream& out) {
  out << kTherapistColumns << '\n';
  for (const auto& r : log.records()) {
    std::string counters;
    for (const auto& [name, value] : r.counters) {
      if (!counters.empty()) counters += ';';
      counters += name + "=" + std::to_string(value);
    }
    out << r.tick << ',' << nlohmann::json(r.engagement).dump() << ',' << csv_escape(r.scenario_state) << ','
        << csv_escape(counters) << ',' << (r.goal_reached ? "true" : "false") << ',' << r.difficulty << '\n';
  }
}

void write_file_atomically(const std::filesystem::path& file, const std::string& content) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

void export_session(const SessionLog& log, Audience audience, const std::filesystem::path& file) {
  std::ostringstream buffer;
  if (audience == Audience::Therapist) {
    export_therapist(log, buffer);
  } else {
    export_roboticist(log, buffer);
  }
  write_file_atomically(file, buffer.str());
}

SessionLog parse_roboticist(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  SessionLog log;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "session") {
        if (have_header) throw LogError("second session header");
        log = SessionLog(header_from_json(j));
        have_header = true;
      } else if (type == "tick") {
        if (!have_header) throw LogError("tick record before session header");
        log.record(session_record_from_json(j));
      } else {
        throw LogError("unknown record type '" + type + "'");
      }
    } catch (const LogError& e) {
      throw LogError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw LogError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw LogError("missing session header");
  return log;
}

SessionLog load_roboticist_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LogError("cannot open " + file.string());
  return parse_roboticist(in);
}

SessionSummary summarize(const SessionLog& log) {
  SessionSummary s;
  s.session_id = log.header().session_id;
  s.scenario_id = log.header().scenario_id;
  if (log.empty()) return s;
  const auto& last = log.records().back();
  s.final_difficulty = last.difficulty;
  s.goal_reached = last.goal_reached;
  double sum = 0.0;
  for (const auto& r : log.records()) sum += r.engagement;
  s.mean_engagement = sum / static_cast<double>(log.size());
  return s;
}

UserProfile update_history(UserProfile profile, const SessionSummary& summary) {
  profile.performance_history.push_back(
      {summary.session_id, summary.scenario_id, summary.final_difficulty, summary.goal_reached, summary.mean_engagement});
  return profile;
}

}  // namespace carebot
