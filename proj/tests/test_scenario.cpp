#include <doctest.h>

#include "carebot/json_reader.hpp"
#include "carebot/scenario.hpp"
#include "support.hpp"

using namespace carebot;

namespace {

Scenario shipped(const std::string& id) { return test::shipped_catalog().at(id).scenario; }

nlohmann::json two_state() {
  return parse_json_text(R"({
    "id": "mini",
    "counters": ["hits"],
    "tokens": ["a", "b", "c"],
    "states": [
      {"name": "ask", "entry": {"behavior": "prompt_turn", "expects_response": true}},
      {"name": "wait"},
      {"name": "end", "entry": {"behavior": "celebrate"}}
    ],
    "initial": "ask",
    "goal_state": "end",
    "transitions": [
      {"from": "ask", "on": "TaskResponseCorrect", "to": "ask", "increment": ["hits"]},
      {"from": "ask", "on": "GazeAway", "to": "wait", "guard": {"engagement_max": 0.5}},
      {"from": "ask", "on": "GazeAway", "to": "ask", "guard": {"engagement_min": 0.5}},
      {"from": "wait", "on": "GazeOnRobot", "to": "ask"}
    ],
    "goal": [{"counter": "hits", "at_least": 2}],
    "difficulty": [{"prompt_delay": 10, "token_set_size": 1}, {"prompt_delay": 5, "token_set_size": 3}]
  })",
                         "mini.json");
}

std::string load_error_path(const nlohmann::json& doc) {
  try {
    load_scenario(doc, "mini.json");
  } catch (const LoadError& e) {
    return e.path();
  }
  return "";
}

ScenarioState replay(const Scenario& sc, const std::vector<ScenarioStep>& path) {
  auto st = initial_state(sc);
  for (const auto& step : path) st = advance(st, sc, {0, step.event, 1.0}, step.engagement, 0);
  return st;
}

}  // namespace

TEST_CASE("guards are half-open intervals") {
  Guard g{0.3, 0.6};
  CHECK(g.admits(0.3));
  CHECK(g.admits(0.59));
  CHECK_FALSE(g.admits(0.6));
  CHECK_FALSE(g.admits(0.29));
  CHECK(Guard{0.5, std::nullopt}.admits(1.0));
  CHECK_FALSE(Guard{0.0, 0.3}.overlaps(Guard{0.3, std::nullopt}));
  CHECK(Guard{0.0, 0.31}.overlaps(Guard{0.3, std::nullopt}));
  CHECK(Guard{}.overlaps(Guard{0.9, 0.95}));
}

TEST_CASE("overlapping guards are rejected at load") {
  auto doc = two_state();
  doc["transitions"][2]["guard"]["engagement_min"] = 0.4;
  CHECK(load_error_path(doc) == "$.transitions[2]");
  doc = two_state();
  doc["transitions"][1].erase("guard");
  CHECK(load_error_path(doc) == "$.transitions[2]");
}

TEST_CASE("scenario load errors carry a field path") {
  auto doc = two_state();
  doc["initial"] = "nowhere";
  CHECK(load_error_path(doc) == "$.initial");
  doc = two_state();
  doc["transitions"][0]["increment"][0] = "misses";
  CHECK(load_error_path(doc) == "$.transitions[0].increment[0]");
  doc = two_state();
  doc["transitions"][0]["on"] = "Sneeze";
  CHECK(load_error_path(doc) == "$.transitions[0].on");
  doc = two_state();
  doc["transitions"][3]["to"] = "void";
  CHECK(load_error_path(doc) == "$.transitions[3].to");
  doc = two_state();
  doc["difficulty"][1]["token_set_size"] = 4;
  CHECK(load_error_path(doc) == "$.difficulty[1].token_set_size");
  doc = two_state();
  doc["goal"][0]["counter"] = "misses";
  CHECK(load_error_path(doc) == "$.goal[0].counter");
  doc = two_state();
  doc["transitions"][1]["guard"] = {{"engagement_min", 0.5}, {"engagement_max", 0.5}};
  CHECK(load_error_path(doc) == "$.transitions[1].guard");
}

TEST_CASE("entry behaviors are checked against the library") {
  auto sc = load_scenario(two_state(), "mini.json");
  CHECK_NOTHROW(check_behaviors(sc, test::shipped_config()->library, "mini.json"));
  sc.states[0].entry->behavior = "juggle";
  try {
    check_behaviors(sc, test::shipped_config()->library, "mini.json");
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.path() == "$.states[0].entry.behavior");
  }
}

TEST_CASE("advance fires the unique matching transition") {
  const auto sc = load_scenario(two_state(), "mini.json");
  auto st = initial_state(sc);
  CHECK(st.current == "ask");
  REQUIRE(st.pending);
  CHECK(st.pending->expected_token == "a");

  auto low = advance(st, sc, {3, EventKind::GazeAway, 1}, 0.2, 3);
  CHECK(low.current == "wait");
  CHECK_FALSE(low.pending.has_value());
  auto high = advance(st, sc, {3, EventKind::GazeAway, 1}, 0.5, 3);
  CHECK(high.current == "ask");
  CHECK(high.action_ready_tick == 3);
  CHECK(advance(st, sc, {3, EventKind::TouchRobot, 1}, 0.5, 3) == st);

  st = advance(st, sc, {4, EventKind::TaskResponseCorrect, 1}, 0.5, 4);
  CHECK(st.counters.at("hits") == 1);
  CHECK_FALSE(st.goal_reached);
  st = advance(st, sc, {5, EventKind::TaskResponseCorrect, 1}, 0.5, 5);
  CHECK(st.goal_reached);
  CHECK(st.current == "end");
  CHECK(st.pending->behavior == "celebrate");
}

TEST_CASE("tokens rotate through the level's token set") {
  const auto sc = load_scenario(two_state(), "mini.json");
  auto st = set_difficulty(initial_state(sc), sc, 1, 0);
  std::vector<std::string> seen;
  for (int i = 0; i < 6; ++i) {
    st = advance(st, sc, {i, EventKind::GazeAway, 1}, 0.9, i);
    seen.push_back(*st.pending->expected_token);
  }
  // First prompt (index 0) was drawn at level 0; later ones cycle over 3 tokens.
  CHECK(seen == std::vector<std::string>{"b", "c", "a", "b", "c", "a"});
}

TEST_CASE("prompts re-arm after the level delay, other actions are consumed") {
  const auto sc = load_scenario(two_state(), "mini.json");
  auto st = initial_state(sc, 0);
  CHECK(due_action(st, 0).has_value());
  st = mark_action_issued(st, sc, 2);
  CHECK_FALSE(due_action(st, 11).has_value());
  CHECK(due_action(st, 12).has_value());
  st.pending = ScenarioAction{"celebrate", std::nullopt};
  st = mark_action_issued(st, sc, 12);
  CHECK_FALSE(st.pending.has_value());
}

TEST_CASE("difficulty moves one level at a time with hysteresis") {
  const auto sc = shipped("turn_taking");
  DifficultyPolicy pol;
  auto st = initial_state(sc);
  st = adjust_difficulty(st, sc, 0.9, 10, pol);
  CHECK(st.difficulty == 1);
  CHECK(adjust_difficulty(st, sc, 0.9, 109, pol).difficulty == 1);
  st = adjust_difficulty(st, sc, 0.9, 110, pol);
  CHECK(st.difficulty == 2);
  st = adjust_difficulty(st, sc, 1.0, 500, pol);
  CHECK(st.difficulty == 2);
  CHECK(adjust_difficulty(st, sc, 0.5, 500, pol) == st);
  st = adjust_difficulty(st, sc, 0.3, 500, pol);
  CHECK(st.difficulty == 1);
  CHECK(set_difficulty(st, sc, 9, 600).difficulty == 2);
  CHECK(set_difficulty(st, sc, -3, 600).difficulty == 0);
}

TEST_CASE("shortest goal paths in the shipped scenarios") {
  // Hand-derived minimum event counts.
  const std::map<std::string, std::size_t> expected{{"turn_taking", 10}, {"joint_attention", 6}, {"imitation", 5}};
  for (const auto& [id, len] : expected) {
    CAPTURE(id);
    const auto sc = shipped(id);
    const auto path = find_goal_path(sc, 30);
    REQUIRE(path.has_value());
    CHECK(path->size() == len);
    CHECK(replay(sc, *path).goal_reached);
    CHECK_FALSE(find_goal_path(sc, len - 1).has_value());
  }
}

TEST_CASE("unreachable goals are reported") {
  auto doc = two_state();
  doc["transitions"][0]["increment"] = nlohmann::json::array();
  const auto sc = load_scenario(doc, "mini.json");
  CHECK_FALSE(find_goal_path(sc, 30).has_value());
}

TEST_CASE("guard-gated paths need the right engagement") {
  const auto sc = shipped("joint_attention");
  const auto path = find_goal_path(sc);
  REQUIRE(path);
  CHECK(path->front().event == EventKind::GazeOnRobot);
  CHECK(path->front().engagement >= 0.3);
}

TEST_CASE("scenario state JSON round-trips") {
  const auto sc = load_scenario(two_state(), "mini.json");
  auto st = initial_state(sc, 4);
  st.last_difficulty_change = 3;
  CHECK(scenario_state_from_json(to_json(st)) == st);
}
