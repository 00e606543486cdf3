#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support.hpp"

using namespace carebot;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + CAREBOT_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("run writes the exports and a summary") {
  const auto dir = test::scratch_dir("cli_run");
  const auto r = cli("run --ticks 300 --seed 3 --user alex --out \"" + (dir / "a").string() + "\"", dir);
  REQUIRE(r.status == 0);
  const auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["ticks"] == 300);
  CHECK(summary["scenario_id"] == "turn_taking");
  for (const char* f : {"session.jsonl", "session.csv", "scripts.jsonl", "profile.json"}) {
    CHECK(fs::exists(dir / "a" / f));
  }
  const auto log = load_roboticist_file(dir / "a" / "session.jsonl");
  CHECK(log.size() == 300);
  CHECK(log.header().user_id == "alex");
  const auto profile = load_user_profile(nlohmann::json::parse(slurp(dir / "a" / "profile.json")), "profile.json");
  CHECK(profile.performance_history.size() == 1);

  const auto again = cli("run --ticks 300 --seed 3 --user alex --out \"" + (dir / "b").string() + "\"", dir);
  REQUIRE(again.status == 0);
  CHECK(slurp(dir / "a" / "session.jsonl") == slurp(dir / "b" / "session.jsonl"));

  const auto replay = cli("replay --log \"" + (dir / "a" / "session.jsonl").string() + "\"", dir);
  CHECK(replay.status == 0);
  CHECK(nlohmann::json::parse(replay.out)["ok"] == true);
  fs::remove_all(dir);
}

TEST_CASE("run with a supervisor script") {
  const auto dir = test::scratch_dir("cli_script");
  const auto r = cli("run --ticks 200 --persona distractible --script never_reengage --out \"" + dir.string() + "\"",
                     dir);
  REQUIRE(r.status == 0);
  const auto log = load_roboticist_file(dir / "session.jsonl");
  for (const auto& rec : log.records()) {
    if (rec.tick > 0) CHECK(rec.mode == ControllerMode::WizardOfOz);
    for (const auto& t : split_tags(rec.behavior_tag)) CHECK_FALSE(t.starts_with("reengage_"));
  }
  fs::remove_all(dir);
}

TEST_CASE("map prints a robot script") {
  const auto dir = test::scratch_dir("cli_map");
  const auto r = cli("map --behavior express_happiness --robot nao_like", dir);
  REQUIRE(r.status == 0);
  const auto s = motion_script_from_json(nlohmann::json::parse(r.out));
  CHECK(s.robot_id == "nao_like");
  CHECK(s.unmapped.empty());
  CHECK(s.substitutions.at("face.smile") == "body.arms_raise");
  fs::remove_all(dir);
}

TEST_CASE("check validates the shipped data") {
  const auto dir = test::scratch_dir("cli_check");
  const auto r = cli("check", dir);
  CHECK(r.status == 0);
  CHECK(r.out.find("turn_taking: goal reachable") != std::string::npos);
  CHECK(r.out.find("robot probo_like: 0 unmapped") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("bad input exits with an error and a message") {
  const auto dir = test::scratch_dir("cli_bad");
  auto r = cli("run --scenario no_such_scenario --out \"" + dir.string() + "\"", dir);
  CHECK(r.status == 2);
  CHECK(r.err.find("no_such_scenario") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{\"robot_id\": \"x\",\n \"joints\": }";
  r = cli("map --behavior blink --robot \"" + (dir / "broken.json").string() + "\"", dir);
  CHECK(r.status == 2);
  CHECK(r.err.find("2:") != std::string::npos);

  r = cli("map --behavior moonwalk", dir);
  CHECK(r.status == 2);
  r = cli("run --mode paused --out \"" + dir.string() + "\"", dir);
  CHECK(r.status == 2);
  r = cli("frobnicate", dir);
  CHECK(r.status != 0);
  std::ofstream(dir / "bad.jsonl") << "{\"type\":\"tick\"}\n";
  r = cli("replay --log \"" + (dir / "bad.jsonl").string() + "\"", dir);
  CHECK(r.status == 2);
  CHECK(r.err.find("line 1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("serve runs a bounded live session") {
  const auto dir = test::scratch_dir("cli_serve");
  const auto r = cli("serve --scenario imitation --port 0 --period-ms 1 --max-ticks 50 --out \"" + dir.string() + "\"",
                     dir);
  CHECK(r.status == 0);
  const auto log = load_roboticist_file(dir / "session.jsonl");
  CHECK(log.size() == 50);
  fs::remove_all(dir);
}
