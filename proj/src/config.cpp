#include "carebot/config.hpp"

#include <algorithm>
#include <cstdlib>

#include "carebot/json_reader.hpp"

namespace carebot {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  std::filesystem::path p(ref);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

void read_interval(const JsonReader& r, Tick& lo, Tick& hi) {
  if (r.size() != 2) r.fail("expected [min, max]");
  lo = r.at(std::size_t{0}).integer();
  hi = r.at(std::size_t{1}).integer();
  if (lo < 1 || hi < lo) r.fail("interval must satisfy 1 <= min <= max");
}

}  // namespace

ControllerConfig load_controller_config(const std::filesystem::path& file) {
  const auto doc = load_json_file(file);
  const std::string source = file.string();
  const auto base = file.parent_path();
  JsonReader root(doc, source);

  ControllerConfig cfg;
  cfg.file = source;
  cfg.library = BehaviorLibrary::load_file(resolve(base, root.at("behaviors").string()));
  cfg.rules = RuleSet::load_file(resolve(base, root.at("rules").string()));
  if (auto a = root.find("affect")) cfg.affect = load_affect_config_file(resolve(base, a->string()));
  if (auto p = root.find("robot_personality")) {
    cfg.robot_personality = personality_from_json(p->raw(), source, p->path());
  }
  if (auto p = root.find("perception")) apply_perception_overrides(cfg.perception, p->raw(), source);

  if (auto r = root.find("reactive")) {
    if (auto b = r->find("blink_interval")) read_interval(*b, cfg.reactive.blink_interval_min, cfg.reactive.blink_interval_max);
    if (auto i = r->find("idle_interval")) read_interval(*i, cfg.reactive.idle_interval_min, cfg.reactive.idle_interval_max);
    if (r->has("gaze_threshold")) cfg.reactive.gaze_threshold = r->at("gaze_threshold").number_in(0, 1);
    const double ceiling = band_ceiling(Source::Reactive);
    if (r->has("blink_priority")) cfg.reactive.blink_priority = r->at("blink_priority").number_in(0, ceiling);
    if (r->has("gaze_priority")) cfg.reactive.gaze_priority = r->at("gaze_priority").number_in(0, ceiling);
    if (r->has("idle_priority")) cfg.reactive.idle_priority = r->at("idle_priority").number_in(0, ceiling);
  }

  if (auto d = root.find("drives")) {
    for (const auto& [name, entry] : d->members()) {
      auto drive = parse_drive(name);
      if (!drive) entry.fail("unknown drive '" + name + "'");
      const auto i = static_cast<std::size_t>(*drive);
      if (entry.has("drift")) cfg.drives.drift[i] = entry.at("drift").number_in(0, 1);
      if (entry.has("setpoint")) cfg.drives.setpoint[i] = entry.at("setpoint").number_in(0, 1);
    }
  }

  if (auto d = root.find("deliberation")) {
    if (d->has("engage_threshold")) cfg.deliberation.engage_threshold = d->at("engage_threshold").number_in(0, 1);
    if (d->has("deficit_floor")) cfg.deliberation.deficit_floor = d->at("deficit_floor").number_in(0, 1);
  }

  if (auto d = root.find("difficulty")) {
    if (d->has("raise_at")) cfg.difficulty.raise_at = d->at("raise_at").number_in(0, 1);
    if (d->has("lower_at")) cfg.difficulty.lower_at = d->at("lower_at").number_in(0, 1);
    if (cfg.difficulty.lower_at >= cfg.difficulty.raise_at) d->fail("lower_at must be below raise_at");
    if (d->has("hysteresis_ticks")) {
      cfg.difficulty.hysteresis_ticks = d->at("hysteresis_ticks").integer();
      if (cfg.difficulty.hysteresis_ticks < 0) d->at("hysteresis_ticks").fail("must be >= 0");
    }
    if (d->has("window_events")) {
      const auto w = d->at("window_events").integer();
      if (w < 1) d->at("window_events").fail("must be >= 1");
      cfg.difficulty.window_events = static_cast<std::size_t>(w);
    }
  }
  return cfg;
}

ScenarioEntry load_scenario_entry(const std::filesystem::path& file, const BehaviorLibrary& library) {
  ScenarioEntry e{load_scenario_file(file), file.string()};
  check_behaviors(e.scenario, library, e.file);
  return e;
}

ScenarioCatalog load_scenario_catalog(const std::filesystem::path& dir, const BehaviorLibrary& library) {
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".json") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  ScenarioCatalog catalog;
  for (const auto& f : files) {
    auto entry = load_scenario_entry(f, library);
    const auto id = entry.scenario.id;
    if (!catalog.emplace(id, std::move(entry)).second) {
      throw LoadError(f.string(), "$.id", "duplicate scenario id '" + id + "'");
    }
  }
  return catalog;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CAREBOT_DATA_DIR"); env && *env) return env;
  return CAREBOT_DEFAULT_DATA_DIR;
}

}  // namespace carebot
