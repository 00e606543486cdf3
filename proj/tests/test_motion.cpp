#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "carebot/json_reader.hpp"
#include "carebot/motion.hpp"
#include "support.hpp"

using namespace carebot;

namespace {

AbstractBehavior single(const std::string& id, double intensity, Tick duration = 10) {
  AbstractBehavior b;
  b.units = {{id, intensity, duration}};
  b.tag = "t";
  return b;
}

double final_target(const MotionScript& s, const std::string& joint) {
  double v = NAN;
  for (const auto& f : s.keyframes) {
    if (auto it = f.targets.find(joint); it != f.targets.end()) v = it->second;
  }
  return v;
}

std::string load_error_path(nlohmann::json doc) {
  try {
    load_morphology(doc, "robot.json");
  } catch (const LoadError& e) {
    return e.path();
  }
  return "";
}

nlohmann::json tiny_robot() {
  return parse_json_text(R"({
    "robot_id": "tiny",
    "joints": {"neck": {"min": -1, "max": 1, "max_velocity": 0.25, "neutral": 0}},
    "au_map": {"body.head_nod": [{"joint": "neck", "gain": 0.8}]},
    "fallbacks": {"face.blink": "body.head_nod"}
  })",
                         "tiny.json");
}

}  // namespace

TEST_CASE("shipped robots load with their declared capabilities") {
  const auto nao = test::shipped_robot("nao_like");
  const auto probo = test::shipped_robot("probo_like");
  CHECK(nao.joints.size() == 25);
  for (const auto& au : nao.capabilities()) CHECK_FALSE(is_facial_unit(au));
  CHECK(nao.fallbacks.at("face.smile") == "body.arms_raise");
  CHECK(probo.capabilities().contains("face.smile"));
}

TEST_CASE("empty behavior maps to an empty script") {
  const auto s = map_behavior({}, test::shipped_robot("nao_like"));
  CHECK(s.keyframes.empty());
  CHECK(s.unmapped.empty());
  CHECK(s.robot_id == "nao_like");
}

TEST_CASE("arms_raise at full intensity on the nao-like robot reaches -0.1") {
  const auto nao = test::shipped_robot("nao_like");
  const auto s = map_behavior(single("body.arms_raise", 1.0), nao);
  CHECK(final_target(s, "LShoulderPitch") == doctest::Approx(std::max(-2.0857, 1.4 - 1.5)));
  CHECK(script_violations(s, nao).empty());
}

TEST_CASE("targets clamp to joint limits") {
  const auto nao = test::shipped_robot("nao_like");
  auto b = single("body.head_down", 1.0);
  b.amplitude_scale = 1.5;
  const auto s = map_behavior(b, nao);
  // 0 + 0.5 * 1.0 * 1.5 = 0.75 exceeds the 0.5149 limit.
  CHECK(final_target(s, "HeadPitch") == doctest::Approx(0.5149));
}

TEST_CASE("timing is duration over speed, at least one tick") {
  const auto robot = load_morphology(tiny_robot(), "tiny.json");
  auto b = single("body.head_nod", 0.1, 9);
  b.speed_scale = 1.3;
  auto s = map_behavior(b, robot);
  REQUIRE(s.keyframes.size() == 1);
  CHECK(s.keyframes[0].offset == 7);  // ceil(9 / 1.3)
  b = single("body.head_nod", 0.1, 1);
  b.speed_scale = 1.5;
  CHECK(map_behavior(b, robot).keyframes[0].offset == 1);
}

TEST_CASE("fast moves are subdivided at max velocity") {
  const auto robot = load_morphology(tiny_robot(), "tiny.json");
  // Target 0.8 in 1 tick with a 0.25 rad/tick joint: 4 steps.
  const auto s = map_behavior(single("body.head_nod", 1.0, 1), robot);
  REQUIRE(s.keyframes.size() == 4);
  const std::array<double, 4> expected{0.25, 0.5, 0.75, 0.8};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(s.keyframes[k].offset == static_cast<Tick>(k + 1));
    CHECK(s.keyframes[k].targets.at("neck") == doctest::Approx(expected[k]));
  }
  CHECK(script_violations(s, robot).empty());
}

TEST_CASE("fallbacks substitute and unmapped units are listed") {
  const auto robot = load_morphology(tiny_robot(), "tiny.json");
  AbstractBehavior b;
  b.units = {{"body.wave", 0.5, 3}, {"face.blink", 0.25, 3}};
  const auto s = map_behavior(b, robot);
  CHECK(s.unmapped == std::vector<std::string>{"body.wave"});
  CHECK(s.substitutions.at("face.blink") == "body.head_nod");
  CHECK(final_target(s, "neck") == doctest::Approx(0.2));
}

TEST_CASE("a directly requested unit and its fallback keep the stronger request") {
  const auto robot = load_morphology(tiny_robot(), "tiny.json");
  AbstractBehavior b;
  b.units = {{"body.head_nod", 0.25, 3}, {"face.blink", 0.5, 3}};
  CHECK(final_target(map_behavior(b, robot), "neck") == doctest::Approx(0.4));
}

TEST_CASE("smile is substituted on the faceless robot and mapped on the expressive one") {
  const auto nao = test::shipped_robot("nao_like");
  const auto probo = test::shipped_robot("probo_like");
  const auto b = single("face.smile", 0.5);
  const auto on_nao = map_behavior(b, nao);
  CHECK(on_nao.substitutions.at("face.smile") == "body.arms_raise");
  CHECK(final_target(on_nao, "LShoulderPitch") == doctest::Approx(1.4 - 0.75));
  const auto on_probo = map_behavior(b, probo);
  CHECK(on_probo.substitutions.empty());
  CHECK(final_target(on_probo, "mouth_corner_left") == doctest::Approx(0.2));
}

TEST_CASE("every library behavior maps on both robots without drops or violations") {
  const auto& lib = test::shipped_config()->library;
  for (const auto* name : {"nao_like", "probo_like"}) {
    const auto robot = test::shipped_robot(name);
    for (const auto& [tag, def] : lib.behaviors()) {
      CAPTURE(tag);
      AbstractBehavior b;
      b.units = def.units;
      b.tag = tag;
      for (double amp : {0.5, 1.0, 1.5}) {
        b.amplitude_scale = amp;
        b.speed_scale = amp;
        const auto s = map_behavior(b, robot);
        CHECK(s.unmapped.empty());
        CHECK_FALSE(s.keyframes.empty());
        CHECK(script_violations(s, robot).empty());
      }
    }
  }
}

TEST_CASE("violations are detected") {
  const auto robot = load_morphology(tiny_robot(), "tiny.json");
  MotionScript s;
  s.keyframes = {{1, {{"neck", 0.5}}}};
  CHECK(script_violations(s, robot).size() == 1);  // 0.5 in one tick
  s.keyframes = {{2, {{"neck", 0.5}}}, {10, {{"neck", 1.5}}}};
  CHECK(script_violations(s, robot).size() == 1);  // out of range
  s.keyframes = {{2, {{"neck", 0.1}}}, {2, {{"neck", 0.1}}}};
  CHECK(script_violations(s, robot).size() == 1);  // offsets
  s.keyframes = {{2, {{"hip", 0.1}}}};
  CHECK(script_violations(s, robot).size() == 1);
}

TEST_CASE("neutral pose returns every joint to neutral") {
  const auto nao = test::shipped_robot("nao_like");
  const auto s = neutral_pose_script(nao);
  REQUIRE(s.keyframes.size() == 1);
  CHECK(s.keyframes[0].targets.size() == nao.joints.size());
  CHECK(s.keyframes[0].targets.at("LShoulderPitch") == 1.4);
}

TEST_CASE("morphology load errors carry a field path") {
  auto doc = tiny_robot();
  doc["au_map"]["body.head_nod"][0]["joint"] = "tail";
  CHECK(load_error_path(doc) == "$.au_map.body.head_nod[0].joint");

  doc = tiny_robot();
  doc["fallbacks"]["face.blink"] = "face.wink";
  CHECK(load_error_path(doc) == "$.fallbacks.face.blink");

  doc = tiny_robot();
  doc["fallbacks"]["face.smile"] = "face.blink";
  CHECK(load_error_path(doc) == "$.fallbacks.face.smile");

  doc = tiny_robot();
  doc["fallbacks"] = {{"face.smile", "face.frown"}, {"face.frown", "face.smile"}};
  CHECK(load_error_path(doc) == "$.fallbacks.face.frown");

  doc = tiny_robot();
  doc["joints"]["neck"]["min"] = 2;
  CHECK(load_error_path(doc) == "$.joints.neck");

  doc = tiny_robot();
  doc["au_map"]["face.grin"] = doc["au_map"]["body.head_nod"];
  CHECK(load_error_path(doc) == "$.au_map.face.grin");
}

TEST_CASE("motion script JSON round-trips") {
  const auto nao = test::shipped_robot("nao_like");
  auto b = single("face.smile", 0.5);
  b.speech = "yay";
  const auto s = map_behavior(b, nao);
  CHECK(motion_script_from_json(to_json(s)) == s);
}
