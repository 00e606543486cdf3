// Command-line front end: simulated sessions, replay, motion mapping, data
// checks and the live supervision endpoint.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "carebot/config.hpp"
#include "carebot/controller.hpp"
#include "carebot/service.hpp"
#include "carebot/sim.hpp"

namespace fs = std::filesystem;
using namespace carebot;

namespace {

std::atomic<bool> g_interrupted{false};

/// A value that names an existing file is used as is; otherwise it is looked
/// up as `<data>/<kind>/<value>.json`.
fs::path data_file(const std::string& kind, const std::string& value) {
  fs::path p(value);
  if (!fs::exists(p)) p = default_data_dir() / kind / (value + ".json");
  if (!fs::exists(p)) throw std::runtime_error("no " + kind + " file for '" + value + "'");
  return fs::absolute(p).lexically_normal();
}

struct SessionFiles {
  std::string config = "default";
  std::string scenario = "turn_taking";
  std::string robot = "nao_like";
  std::string persona = "responsive";
  std::string user;
  std::string mode = "autonomous";
  std::uint64_t seed = 42;
  std::string session_id = "session";
};

void add_session_options(CLI::App* cmd, SessionFiles& f) {
  cmd->add_option("--config", f.config, "Controller config (name or path)")->capture_default_str();
  cmd->add_option("--scenario", f.scenario, "Scenario (name or path)")->capture_default_str();
  cmd->add_option("--robot", f.robot, "Robot morphology (name or path)")->capture_default_str();
  cmd->add_option("--persona", f.persona, "Simulated user persona (name or path)")->capture_default_str();
  cmd->add_option("--user", f.user, "User profile (name or path)");
  cmd->add_option("--mode", f.mode, "Initial mode")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Session seed")->capture_default_str();
  cmd->add_option("--session-id", f.session_id, "Session id recorded in the log")->capture_default_str();
}

struct Built {
  std::unique_ptr<Controller> controller;
  std::optional<Persona> persona;
  std::string persona_file;
};

Built build(const SessionFiles& f, bool need_scenario) {
  auto config = std::make_shared<const ControllerConfig>(load_controller_config(data_file("config", f.config)));
  ScenarioCatalog catalog = load_scenario_catalog(default_data_dir() / "scenarios", config->library);
  std::string scenario_id;
  if (need_scenario) {
    auto entry = load_scenario_entry(data_file("scenarios", f.scenario), config->library);
    scenario_id = entry.scenario.id;
    catalog[scenario_id] = std::move(entry);
  }
  auto mode = parse_mode(f.mode);
  if (!mode || !is_operating_mode(*mode)) throw std::runtime_error("mode must be autonomous, approval or wizard_of_oz");

  Built b;
  SessionSetup setup;
  setup.session_id = f.session_id;
  setup.scenario_id = scenario_id;
  setup.mode = *mode;
  setup.seed = f.seed;
  const auto robot_file = data_file("robots", f.robot);
  setup.robot_file = robot_file.string();
  if (!f.persona.empty()) {
    b.persona_file = data_file("personas", f.persona).string();
    b.persona = load_persona_file(b.persona_file);
    setup.persona_file = b.persona_file;
  }
  if (!f.user.empty()) setup.user = load_user_profile_file(data_file("users", f.user));
  b.controller =
      std::make_unique<Controller>(config, std::move(catalog), load_morphology_file(robot_file), std::move(setup));
  return b;
}

void write_outputs(const Controller& controller, const std::vector<MotionScript>& scripts, const fs::path& out,
                   const std::optional<UserProfile>& user) {
  fs::create_directories(out);
  export_session(controller.log(), Audience::Roboticist, out / "session.jsonl");
  export_session(controller.log(), Audience::Therapist, out / "session.csv");
  std::string lines;
  for (const auto& s : scripts) lines += to_json(s).dump() + "\n";
  write_file_atomically(out / "scripts.jsonl", lines);
  if (user) {
    auto updated = update_history(*user, summarize(controller.log()));
    write_file_atomically(out / "profile.json", to_json(updated).dump(2) + "\n");
    if (const char* env = std::getenv("CAREBOT_PROFILE_DIR"); env && *env) ProfileStore(env).save(updated);
  }
}

int cmd_run(const SessionFiles& f, Tick ticks, const std::string& script_ref, bool stop_on_goal, const fs::path& out) {
  auto b = build(f, true);
  if (!b.persona) throw std::runtime_error("run needs a persona");
  SimOptions opts;
  opts.ticks = ticks;
  opts.stop_on_goal = stop_on_goal;
  if (!script_ref.empty()) opts.script = load_command_script_file(data_file("woz", script_ref), ticks);
  SimulatedUser user(*b.persona, persona_seed(f.seed));
  const auto result = run_session(*b.controller, user, opts);

  std::optional<UserProfile> profile;
  if (!f.user.empty()) profile = load_user_profile_file(data_file("users", f.user));
  write_outputs(*b.controller, result.scripts, out, profile);

  const auto summary = summarize(b.controller->log());
  nlohmann::json report{{"session_id", summary.session_id},
                        {"scenario_id", summary.scenario_id},
                        {"ticks", result.ticks_run},
                        {"scripts", result.scripts.size()},
                        {"mean_engagement", result.mean_engagement},
                        {"goal_reached", result.goal_reached},
                        {"final_difficulty", summary.final_difficulty},
                        {"output", out.string()}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_replay(const fs::path& log_file) {
  const auto log = load_roboticist_file(log_file);
  const auto report = replay_session(log);
  nlohmann::json j{{"ticks", report.ticks}, {"mismatches", report.mismatches}, {"ok", report.ok()}};
  std::cout << j.dump(2) << '\n';
  return report.ok() ? 0 : 1;
}

int cmd_map(const std::string& config_ref, const std::string& tag, const std::string& robot_ref) {
  const auto config = load_controller_config(data_file("config", config_ref));
  const auto robot = load_morphology_file(data_file("robots", robot_ref));
  AbstractBehavior b;
  const auto cand = config.library.instantiate(tag, Source::Deliberative, kDeliberativePriority);
  b.units = cand.units;
  b.speech = cand.speech;
  b.tag = cand.tag;
  std::cout << to_json(map_behavior(b, robot)).dump(2) << '\n';
  return 0;
}

int cmd_check(const std::string& config_ref) {
  const auto config = load_controller_config(data_file("config", config_ref));
  const auto catalog = load_scenario_catalog(default_data_dir() / "scenarios", config.library);
  int failures = 0;
  for (const auto& [id, entry] : catalog) {
    const auto path = find_goal_path(entry.scenario, 30);
    std::cout << "scenario " << id << ": ";
    if (path) {
      std::cout << "goal reachable in " << path->size() << " events\n";
    } else {
      std::cout << "goal NOT reachable within 30 events\n";
      ++failures;
    }
  }
  for (const auto& f : fs::directory_iterator(default_data_dir() / "robots")) {
    if (f.path().extension() != ".json") continue;
    const auto robot = load_morphology_file(f.path());
    std::size_t unmapped = 0;
    for (const auto& [tag, def] : config.library.behaviors()) {
      AbstractBehavior b;
      b.units = def.units;
      b.tag = tag;
      unmapped += map_behavior(b, robot).unmapped.size();
    }
    std::cout << "robot " << robot.robot_id << ": " << unmapped << " unmapped units across "
              << config.library.behaviors().size() << " behaviors\n";
    if (unmapped) ++failures;
  }
  return failures ? 1 : 0;
}

int cmd_serve(const SessionFiles& f, bool scenario_given, const std::string& address, unsigned short port,
              int period_ms, Tick max_ticks, const std::string& input, const fs::path& out) {
  auto b = build(f, scenario_given);
  Controller& controller = *b.controller;
  SupervisionService service(controller, address, port);
  std::cerr << "listening on ws://" << address << ":" << service.port() << "\n";

  std::optional<SimulatedUser> user;
  if (b.persona) user.emplace(*b.persona, persona_seed(f.seed));
  ReplayStream stream;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    stream = read_replay(in);
    for (const auto& r : stream.rejected) std::cerr << input << ":" << r.line << ": " << r.reason << "\n";
  }
  std::size_t next_record = 0;
  std::vector<MotionScript> scripts;

  const auto period = std::chrono::milliseconds(period_ms);
  auto deadline = std::chrono::steady_clock::now();
  while (!controller.stopped()) {
    if (g_interrupted) controller.submit(SupervisionCommand::simple(CommandKind::Stop));
    deadline += period;
    if (!controller.started()) {
      for (const auto& ack : controller.poll()) service.broadcast(ack_message(ack));
      if (scenario_given && !controller.started() && !controller.stopped()) controller.start();
    } else {
      const Tick now = controller.now();
      std::vector<RawSensorRecord> records;
      if (!input.empty()) {
        while (next_record < stream.records.size() && stream.records[next_record].tick <= now) {
          if (stream.records[next_record].tick == now) records.push_back(stream.records[next_record]);
          ++next_record;
        }
      } else if (user) {
        records = user->sense(now);
      }
      auto result = controller.tick(records);
      if (user) user->observe(now, result);
      for (const auto& ack : result.acks) service.broadcast(ack_message(ack));
      service.broadcast(snapshot_message(result.record, controller));
      if (result.script) scripts.push_back(std::move(*result.script));
      if (max_ticks > 0 && controller.now() >= max_ticks) break;
    }
    const auto now = std::chrono::steady_clock::now();
    if (now > deadline) {
      const auto late = std::chrono::duration_cast<std::chrono::milliseconds>(now - deadline).count();
      if (late > 0) std::cerr << "tick overrun by " << late << " ms\n";
      deadline = now;
    } else {
      std::this_thread::sleep_until(deadline);
    }
  }
  service.shutdown();
  if (controller.started()) write_outputs(controller, scripts, out, std::nullopt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carebot: supervised behavior control for robot-assisted therapy"};
  app.require_subcommand(1);

  SessionFiles files;
  Tick ticks = 1000;
  std::string script;
  bool stop_on_goal = false;
  std::string out = "out";
  auto* run = app.add_subcommand("run", "Run a simulated session and export its logs");
  add_session_options(run, files);
  run->add_option("--ticks", ticks, "Number of ticks")->capture_default_str();
  run->add_option("--script", script, "Supervisor command script (name in data/woz or path)");
  run->add_flag("--stop-on-goal", stop_on_goal, "End the session once the scenario goal is reached");
  run->add_option("--out", out, "Output directory")->capture_default_str();

  std::string log_file;
  auto* replay = app.add_subcommand("replay", "Re-run a logged session and compare behavior tags");
  replay->add_option("--log", log_file, "Roboticist export (session.jsonl)")->required();

  std::string tag, robot = "nao_like", config = "default";
  auto* map = app.add_subcommand("map", "Map one library behavior onto a robot");
  map->add_option("--behavior", tag, "Behavior tag")->required();
  map->add_option("--robot", robot, "Robot morphology (name or path)")->capture_default_str();
  map->add_option("--config", config, "Controller config (name or path)")->capture_default_str();

  auto* check = app.add_subcommand("check", "Validate shipped data: scenario reachability, robot coverage");
  check->add_option("--config", config, "Controller config (name or path)")->capture_default_str();

  SessionFiles serve_files;
  serve_files.scenario.clear();
  std::string address = "127.0.0.1", input;
  unsigned short port = 8765;
  int period_ms = 100;
  Tick max_ticks = 0;
  std::string serve_out = "out";
  auto* serve = app.add_subcommand("serve", "Run a live session behind the WebSocket supervision endpoint");
  add_session_options(serve, serve_files);
  serve->add_option("--address", address, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "TCP port (0 = any free port)")->capture_default_str();
  serve->add_option("--period-ms", period_ms, "Tick period")->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--max-ticks", max_ticks, "Stop after this many ticks (0 = until stopped)");
  serve->add_option("--input", input, "Replay raw sensor records from this file instead of a persona");
  serve->add_option("--out", serve_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGINT, [](int) { g_interrupted = true; });

  try {
    if (*run) return cmd_run(files, ticks, script, stop_on_goal, out);
    if (*replay) return cmd_replay(log_file);
    if (*map) return cmd_map(config, tag, robot);
    if (*check) return cmd_check(config);
    if (*serve) {
      if (!input.empty()) serve_files.persona.clear();
      return cmd_serve(serve_files, !serve_files.scenario.empty(), address, port, period_ms, max_ticks, input,
                       serve_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
