#include "carebot/behavior.hpp"

#include <algorithm>
#include <set>

#include "carebot/json_reader.hpp"

namespace carebot {

bool is_registered_unit(std::string_view id) {
  return std::find(kActionUnitVocabulary.begin(), kActionUnitVocabulary.end(), id) !=
         kActionUnitVocabulary.end();
}

double band_ceiling(Source s) {
  switch (s) {
    case Source::Reactive: return 0.2;
    case Source::Emotional: return 0.3;
    case Source::Deliberative: return 1.0;
  }
  return 0.0;
}

const ActionUnit* CandidateBehavior::find_unit(std::string_view id) const {
  auto it = std::find_if(units.begin(), units.end(), [&](const ActionUnit& u) { return u.id == id; });
  return it == units.end() ? nullptr : &*it;
}

void normalize_units(std::vector<ActionUnit>& units) {
  std::sort(units.begin(), units.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(units.begin(), units.end(),
                                [](const auto& a, const auto& b) { return a.id == b.id; });
  if (dup != units.end()) throw std::invalid_argument("duplicate action unit '" + dup->id + "'");
}

std::vector<std::string> split_tags(std::string_view tag) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= tag.size()) {
    auto end = tag.find('+', start);
    if (end == std::string_view::npos) end = tag.size();
    if (end > start) out.emplace_back(tag.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

namespace {

std::vector<ActionUnit> read_units(const JsonReader& list) {
  std::vector<ActionUnit> units;
  std::set<std::string> seen;
  for (const auto& u : list.elements()) {
    ActionUnit unit;
    unit.id = u.at("id").string();
    if (!is_registered_unit(unit.id)) u.at("id").fail("unregistered action unit '" + unit.id + "'");
    if (!seen.insert(unit.id).second) u.at("id").fail("duplicate action unit '" + unit.id + "'");
    unit.intensity = u.at("intensity").number_in(0, 1);
    unit.duration = u.integer_or("duration", 10);
    if (unit.duration < 1) u.at("duration").fail("duration must be >= 1 tick");
    units.push_back(std::move(unit));
  }
  normalize_units(units);
  return units;
}

Drive read_drive(const std::string& name, const JsonReader& where) {
  auto d = parse_drive(name);
  if (!d) where.fail("unknown drive '" + name + "'");
  return *d;
}

}  // namespace

BehaviorLibrary BehaviorLibrary::load(const nlohmann::json& j, const std::string& source) {
  BehaviorLibrary lib;
  JsonReader root(j, source);

  for (const auto& b : root.at("behaviors").elements()) {
    BehaviorDefinition def;
    def.tag = b.at("tag").string();
    if (def.tag.empty() || def.tag.find('+') != std::string::npos) {
      b.at("tag").fail("tag must be non-empty and must not contain '+'");
    }
    def.units = read_units(b.at("units"));
    if (auto speech = b.find("speech")) def.speech = speech->string();
    if (auto sat = b.find("satisfies")) {
      for (const auto& [name, amount] : sat->members()) {
        def.satisfies[read_drive(name, amount)] = amount.number_in(0, 1);
      }
    }
    if (lib.behaviors_.contains(def.tag)) b.at("tag").fail("duplicate behavior tag '" + def.tag + "'");
    lib.behaviors_.emplace(def.tag, std::move(def));
  }

  auto require_tag = [&](const JsonReader& r) {
    auto tag = r.string();
    if (!lib.contains(tag)) r.fail("undefined behavior '" + tag + "'");
    return tag;
  };

  auto reactive = root.at("reactive");
  lib.blink_ = require_tag(reactive.at("blink"));
  lib.gaze_shift_ = require_tag(reactive.at("gaze_shift"));
  lib.idle_ = require_tag(reactive.at("idle"));

  for (const auto& [name, tag] : root.at("emotions").members()) {
    auto label = parse_emotion(name);
    if (!label || *label == EmotionLabel::Neutral) tag.fail("unknown emotion label '" + name + "'");
    lib.expressions_[*label] = require_tag(tag);
  }
  for (const auto& entry : kEmotionNames) {
    if (entry.value != EmotionLabel::Neutral && !lib.expressions_.contains(entry.value)) {
      root.at("emotions").fail("no expression for emotion '" + std::string(entry.name) + "'");
    }
  }

  // Cross-robot expression contract: happiness lifts the arms, sadness slumps
  // the body and drops the head.
  auto require_units = [&](EmotionLabel label, std::initializer_list<std::string_view> ids) {
    const auto& def = lib.behaviors_.at(lib.expressions_.at(label));
    for (auto id : ids) {
      bool found = std::any_of(def.units.begin(), def.units.end(), [&](const auto& u) { return u.id == id; });
      if (!found) {
        root.at("emotions").at(to_string(label)).fail("expression must include '" + std::string(id) + "'");
      }
    }
  };
  require_units(EmotionLabel::Pleasure, {"body.arms_raise"});
  require_units(EmotionLabel::Excitement, {"body.arms_raise"});
  require_units(EmotionLabel::Misery, {"body.lean", "body.head_down"});
  require_units(EmotionLabel::Depression, {"body.lean", "body.head_down"});

  for (const auto& [name, tag] : root.at("drives").members()) {
    lib.drive_behaviors_[read_drive(name, tag)] = require_tag(tag);
  }
  for (const auto& [name, tag] : root.at("reengage").members()) {
    auto t = require_tag(tag);
    if (!t.starts_with("reengage_")) tag.fail("re-engagement behaviors must be tagged 'reengage_*'");
    lib.reengage_behaviors_[read_drive(name, tag)] = t;
  }
  for (Drive d : kDrives) {
    if (!lib.drive_behaviors_.contains(d)) root.at("drives").fail("no behavior for drive '" + std::string(to_string(d)) + "'");
    if (!lib.reengage_behaviors_.contains(d)) root.at("reengage").fail("no behavior for drive '" + std::string(to_string(d)) + "'");
  }
  return lib;
}

BehaviorLibrary BehaviorLibrary::load_file(const std::filesystem::path& file) {
  return load(load_json_file(file), file.string());
}

const BehaviorDefinition* BehaviorLibrary::find(std::string_view tag) const {
  auto it = behaviors_.find(tag);
  return it == behaviors_.end() ? nullptr : &it->second;
}

const BehaviorDefinition& BehaviorLibrary::get(std::string_view tag) const {
  const auto* def = find(tag);
  if (!def) throw std::out_of_range("unknown behavior '" + std::string(tag) + "'");
  return *def;
}

CandidateBehavior BehaviorLibrary::instantiate(std::string_view tag, Source source, double priority) const {
  const auto& def = get(tag);
  CandidateBehavior c;
  c.source = source;
  c.units = def.units;
  c.speech = def.speech;
  c.priority = priority;
  c.tag = def.tag;
  return c;
}

const std::string& BehaviorLibrary::expression_for(EmotionLabel label) const {
  return expressions_.at(label);
}

std::map<Drive, double> BehaviorLibrary::satisfactions_of(std::string_view tag) const {
  std::map<Drive, double> out;
  for (const auto& t : split_tags(tag)) {
    if (const auto* def = find(t)) {
      for (const auto& [d, amount] : def->satisfies) out[d] += amount;
    }
  }
  return out;
}

nlohmann::json to_json(const ActionUnit& u) {
  return {{"id", u.id}, {"intensity", u.intensity}, {"duration", u.duration}};
}

ActionUnit unit_from_json(const nlohmann::json& j) {
  return {j.at("id").get<std::string>(), j.at("intensity").get<double>(), j.at("duration").get<Tick>()};
}

nlohmann::json to_json(const UnitLimit& l) {
  nlohmann::json j = nlohmann::json::object();
  put_optional(j, "max_intensity", l.max_intensity);
  put_optional(j, "max_rate", l.max_rate);
  return j;
}

UnitLimit limit_from_json(const nlohmann::json& j) {
  return {get_optional<double>(j, "max_intensity"), get_optional<double>(j, "max_rate")};
}

nlohmann::json to_json(const CandidateBehavior& b) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : b.units) units.push_back(to_json(u));
  nlohmann::json limits = nlohmann::json::object();
  for (const auto& [id, l] : b.limits) limits[id] = to_json(l);
  nlohmann::json j{{"source", to_string(b.source)}, {"units", units},   {"priority", b.priority},
                   {"tag", b.tag},                  {"limits", limits}};
  put_optional(j, "speech", b.speech);
  put_optional(j, "gaze_target", b.gaze_target);
  return j;
}

CandidateBehavior candidate_from_json(const nlohmann::json& j) {
  CandidateBehavior b;
  auto src = parse_source(j.at("source").get<std::string>());
  if (!src) throw std::invalid_argument("unknown source");
  b.source = *src;
  for (const auto& u : j.at("units")) b.units.push_back(unit_from_json(u));
  b.priority = j.at("priority").get<double>();
  b.tag = j.at("tag").get<std::string>();
  if (j.contains("limits")) {
    for (auto it = j["limits"].begin(); it != j["limits"].end(); ++it) b.limits[it.key()] = limit_from_json(*it);
  }
  b.speech = get_optional<std::string>(j, "speech");
  b.gaze_target = get_optional<std::string>(j, "gaze_target");
  return b;
}

}  // namespace carebot
