// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "carebot/json_reader.hpp"
#include "support.hpp"

using namespace carebot;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(1) << v;
  return s.str();
}


CriterionResult determinism() {
  const auto dir = test::scratch_dir("acceptance_determinism");
  std::vector<double> times;
  for (const char* name : {"a", "b"}) {
    const auto out = dir / name;
    const std::string cmd = std::string("\"") + CAREBOT_CLI + "\" run --seed 42 --ticks 1000 --out \"" +
                            out.string() + "\" >/dev/null 2>&1";
    const auto t0 = Clock::now();
    const int raw = std::system(cmd.c_str());
    times.push_back(seconds_since(t0));
    if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) return {false, "carebot run failed"};
  }
  const auto a = slurp(dir / "a" / "session.jsonl");
  const auto b = slurp(dir / "b" / "session.jsonl");
  std::size_t lines = 0;
  for (char c : a) lines += c == '\n';
  fs::remove_all(dir);
  const bool same = !a.empty() && a == b;
  const bool fast = times[0] < 5.0 && times[1] < 5.0;
  return {same && fast && lines == 1001, std::string(same ? "byte-identical" : "exports differ") + ", " +
                                             std::to_string(lines) + " lines, runs took " + fmt(times[0]) + " s and " +
                                             fmt(times[1]) + " s"};
}

CriterionResult affect_convergence() {
  const auto& cfg = *test::shipped_config();
  std::vector<double> lambdas{resting_mood(cfg.robot_personality, cfg.affect).decay_rate};
  for (double n : {0.0, 0.5, 1.0}) {
    PersonalityProfile p = cfg.robot_personality;
    p.neuroticism = n;
    lambdas.push_back(resting_mood(p, cfg.affect).decay_rate);
  }
  std::string detail;
  bool ok = true;
  for (double lambda : lambdas) {
    MoodState m{1.0, 1.0, 0.0, 0.0, lambda};
    const int bound = static_cast<int>(std::ceil(std::log(2e6) / lambda));
    int reached = -1;
    double worst = 0.0;
    for (int n = 1; n <= bound; ++n) {
      m = step_mood(m, {}, 1.0, 1);
      const double closed = std::pow(1.0 - lambda, n);
      worst = std::max({worst, std::abs(m.valence - closed), std::abs(m.arousal - closed)});
      if (reached < 0 && std::hypot(m.valence, m.arousal) <= 1e-6) reached = n;
    }
    ok = ok && reached > 0 && worst <= 1e-9;
    detail += "lambda " + fmt(lambda, 2) + ": within 1e-6 at tick " + std::to_string(reached) + " (bound " +
              std::to_string(bound) + "), max closed-form error " + sci(worst) + "; ";
  }
  return {ok, detail};
}

// Independent word-boundary vocabulary check.
bool speech_blacklisted(const std::string& speech, const RuleSet& rules) {
  for (const auto& r : rules.rules()) {
    if (r.kind != RuleKind::EthicalVocabulary) continue;
    for (const auto& phrase : r.subject) {
      std::string pattern = "(^|[^a-zA-Z0-9_])";
      for (char ch : phrase) pattern += ch == ' ' ? std::string("[^a-zA-Z0-9_]+") : std::string(1, ch);
      pattern += "($|[^a-zA-Z0-9_])";
      if (std::regex_search(speech, std::regex(pattern, std::regex::icase))) return true;
    }
  }
  return false;
}

// Independent limit and velocity check: every joint starts from neutral.
std::string motion_problem(const MotionScript& s, const RobotMorphology& robot) {
  std::map<std::string, std::pair<Tick, double>> at;
  for (const auto& [name, spec] : robot.joints) at[name] = {0, spec.neutral};
  Tick prev = 0;
  for (const auto& f : s.keyframes) {
    if (f.offset <= prev) return "non-increasing keyframe offsets";
    prev = f.offset;
    for (const auto& [joint, target] : f.targets) {
      const auto it = robot.joints.find(joint);
      if (it == robot.joints.end()) return "unknown joint " + joint;
      if (target < it->second.min - 1e-9 || target > it->second.max + 1e-9) return "out of range " + joint;
      const auto [t0, x0] = at[joint];
      if (std::abs(target - x0) > it->second.max_velocity * static_cast<double>(f.offset - t0) + 1e-9) {
        return "too fast " + joint;
      }
      at[joint] = {f.offset, target};
    }
  }
  return "";
}

CriterionResult safety() {
  const auto& cfg = *test::shipped_config();
  const std::vector<RobotMorphology> robots{test::shipped_robot("nao_like"), test::shipped_robot("probo_like")};
  std::vector<std::string> tags;
  for (const auto& [tag, _] : cfg.library.behaviors()) tags.push_back(tag);
  for (const char* t : {"restrain_child", "punish", "punishment_corner"}) tags.push_back(t);
  const std::vector<std::string> phrases{"Your turn!",     "Well done",        "You are STUPID",  "i hate waiting",
                                         "shut up please", "what a bad boy",   "Stupidity rocks", "hateful",
                                         "look here",      "you dumb-dumb",    "Loser.",          "good, not ugly"};
  Rng rng(20240601);
  int candidates = 0, scripts = 0, vetoes = 0, clamps = 0;
  int bad_vocab = 0, bad_motion = 0, bad_ban = 0, not_idempotent = 0;
  std::map<std::string, double> previous;
  auto fuzz = [&](Source s) {
    CandidateBehavior c;
    c.source = s;
    c.tag = tags[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(tags.size()) - 1))];
    for (auto id : kActionUnitVocabulary) {
      if (rng.bernoulli(0.35)) c.units.push_back({std::string(id), rng.uniform(), rng.uniform_int(1, 30)});
    }
    if (rng.bernoulli(0.6)) {
      c.speech = phrases[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(phrases.size()) - 1))];
    }
    c.priority = s == Source::Deliberative ? kDeliberativePriority : band_ceiling(s) * rng.uniform();
    ++candidates;
    return c;
  };
  auto vetted = [&](const CandidateBehavior& c) -> std::optional<CandidateBehavior> {
    const auto v = vet(c, cfg.rules.rules());
    if (v.outcome == Outcome::Veto) {
      ++vetoes;
      return std::nullopt;
    }
    const auto out = v.outcome == Outcome::Clamp ? *v.modified : c;
    clamps += v.outcome == Outcome::Clamp;
    const auto again = vet(out, cfg.rules.rules());
    if (again.outcome != Outcome::Allow) ++not_idempotent;
    return out;
  };

  while (candidates < 10000) {
    const auto r = vetted(fuzz(Source::Reactive));
    const auto e = vetted(fuzz(Source::Emotional));
    const auto d = vetted(fuzz(Source::Deliberative));
    MoodState mood{rng.uniform(-1, 1), rng.uniform(-1, 1), 0, 0, 0.3};
    PersonalityProfile p;
    p.extraversion = rng.uniform();
    const auto behavior = modulate(fuse(r, d, e), mood, p, previous);
    previous.clear();
    for (const auto& u : behavior.units) {
      const auto lim = behavior.limits.find(u.id);
      if (lim != behavior.limits.end() && lim->second.max_intensity && u.intensity > *lim->second.max_intensity + 1e-12) {
        ++bad_motion;
      }
      previous[u.id] = u.intensity;
    }
    if (behavior.empty()) continue;
    for (const auto& robot : robots) {
      const auto script = map_behavior(behavior, robot);
      ++scripts;
      if (script.speech && speech_blacklisted(*script.speech, cfg.rules)) ++bad_vocab;
      for (const auto& t : split_tags(script.tag)) {
        if (t.starts_with("restrain") || t.starts_with("punish")) ++bad_ban;
      }
      if (!motion_problem(script, robot).empty()) ++bad_motion;
    }
  }
  const bool ok = bad_vocab == 0 && bad_motion == 0 && bad_ban == 0 && not_idempotent == 0 && vetoes > 0 && clamps > 0;
  return {ok, std::to_string(candidates) + " candidates (" + std::to_string(vetoes) + " vetoed, " +
                  std::to_string(clamps) + " clamped), " + std::to_string(scripts) + " scripts: " +
                  std::to_string(bad_vocab) + " vocabulary, " + std::to_string(bad_ban) + " banned tags, " +
                  std::to_string(bad_motion) + " limit/velocity violations, " + std::to_string(not_idempotent) +
                  " non-idempotent verdicts"};
}

CriterionResult platform_independence() {
  const auto& lib = test::shipped_config()->library;
  std::vector<RobotMorphology> robots{test::shipped_robot("nao_like"), test::shipped_robot("probo_like")};
  int mapped = 0, dropped = 0;
  for (const auto& robot : robots) {
    for (const auto& [tag, def] : lib.behaviors()) {
      AbstractBehavior b;
      b.units = def.units;
      b.tag = tag;
      const auto s = map_behavior(b, robot);
      dropped += static_cast<int>(s.unmapped.size());
      mapped += s.unmapped.empty() && !s.keyframes.empty();
    }
  }
  const RobotMorphology* faceless = nullptr;
  for (const auto& r : robots) {
    const auto caps = r.capabilities();
    if (std::none_of(caps.begin(), caps.end(), [](const std::string& c) { return is_facial_unit(c); })) faceless = &r;
  }
  if (!faceless) return {false, "no faceless robot among the shipped morphologies"};
  bool body_only = true;
  std::string detail;
  for (EmotionLabel label : {EmotionLabel::Pleasure, EmotionLabel::Misery}) {
    const auto& def = lib.get(lib.expression_for(label));
    AbstractBehavior b;
    b.units = def.units;
    b.tag = def.tag;
    const auto s = map_behavior(b, *faceless);
    std::set<std::string> performed;
    for (const auto& u : def.units) {
      if (faceless->can(u.id)) {
        performed.insert(u.id);
      } else if (auto it = s.substitutions.find(u.id); it != s.substitutions.end()) {
        performed.insert(it->second);
      }
    }
    const bool all_body = !performed.empty() && std::all_of(performed.begin(), performed.end(), [](const auto& id) {
      return is_body_unit(id);
    });
    body_only = body_only && all_body && !s.keyframes.empty() && s.unmapped.empty();
    detail += def.tag + " -> " + std::to_string(performed.size()) + " body units, " +
              std::to_string(s.keyframes.size()) + " keyframes; ";
  }
  const int expected = static_cast<int>(lib.behaviors().size() * robots.size());
  return {mapped == expected && dropped == 0 && body_only && lib.behaviors().size() == 20,
          std::to_string(mapped) + "/" + std::to_string(expected) + " behavior/robot pairs mapped, " +
              std::to_string(dropped) + " unmapped units; on " + faceless->robot_id + ": " + detail};
}

CriterionResult supervised_autonomy() {
  Rng rng(777);
  int late = 0, sessions = 0, stops = 0, pauses = 0;
  for (int s = 0; s < 100; ++s) {
    const auto mode = s % 2 ? ControllerMode::Approval : ControllerMode::Autonomous;
    auto c = test::make_controller(s % 3 == 0 ? "turn_taking" : (s % 3 == 1 ? "joint_attention" : "imitation"), mode,
                                   static_cast<std::uint64_t>(s + 1));
    SimulatedUser user(test::shipped_persona(s % 2 ? "distractible" : "responsive"), persona_seed(s + 1));
    c->start();
    const Tick pause_at = rng.uniform_int(5, 150);
    const Tick resume_at = pause_at + rng.uniform_int(1, 60);
    const Tick stop_at = resume_at + rng.uniform_int(0, 150);
    std::optional<Tick> paused_since, stopped_since;
    for (Tick t = 0; t < 400 && !c->stopped(); ++t) {
      if (t == pause_at) c->submit(SupervisionCommand::simple(CommandKind::Pause));
      if (t == resume_at) c->submit(SupervisionCommand::simple(CommandKind::Resume));
      if (t == stop_at) c->submit(SupervisionCommand::simple(CommandKind::Stop));
      // Operator noise the controller must ignore while paused/stopped.
      if (rng.bernoulli(0.05)) c->submit(SupervisionCommand::override_behavior("praise"));
      const auto r = c->tick(user.sense(t));
      user.observe(t, r);
      for (const auto& a : r.acks) {
        if (!a.accepted) continue;
        if (a.kind == CommandKind::Pause) paused_since = t, ++pauses;
        if (a.kind == CommandKind::Resume) paused_since.reset();
        if (a.kind == CommandKind::Stop) stopped_since = t, ++stops;
      }
      const bool emitted = r.script.has_value();
      const bool is_stop_pose = stopped_since && *stopped_since == t && r.script && r.script->tag == "neutral_pose";
      if (emitted && paused_since && t > *paused_since) ++late;
      if (emitted && stopped_since && t > *stopped_since) ++late;
      if (emitted && stopped_since && t == *stopped_since && !is_stop_pose) ++late;
    }
    if (!c->stopped()) ++late;  // stop must always take effect
    ++sessions;
  }

  // Approval: 1000 ticks, the supervisor approves or denies now and then.
  auto c = test::make_controller("turn_taking", ControllerMode::Approval, 42);
  SimulatedUser user(test::shipped_persona("distractible"), persona_seed(42));
  c->start();
  int unapproved = 0, approved = 0;
  std::set<std::int64_t> offered;
  for (Tick t = 0; t < 1000; ++t) {
    for (const auto& q : c->approval_queue()) offered.insert(q.id);
    if (t % 40 == 10 && !c->approval_queue().empty()) {
      const auto id = c->approval_queue().front().id;
      c->submit(t % 80 == 10 ? SupervisionCommand::approve(id) : SupervisionCommand::deny(id));
    }
    const auto r = c->tick(user.sense(t));
    user.observe(t, r);
    bool deliberative = false;
    for (const auto& [id, src] : r.record.provenance) deliberative |= src == Source::Deliberative;
    if (!deliberative) continue;
    if (r.record.origin == DeliberativeOrigin::Approved && r.record.approval_id && offered.contains(*r.record.approval_id)) {
      ++approved;
    } else {
      ++unapproved;
    }
  }
  const bool ok = late == 0 && sessions == 100 && stops == 100 && unapproved == 0 && approved > 0;
  return {ok, std::to_string(sessions) + " sessions (" + std::to_string(pauses) + " pauses, " + std::to_string(stops) +
                  " stops): " + std::to_string(late) + " late emissions; approval session: " +
                  std::to_string(approved) + " approved, " + std::to_string(unapproved) + " unapproved deliberative emissions"};
}

CriterionResult scenarios() {
  const auto& lib = test::shipped_config()->library;
  const auto catalog = test::shipped_catalog();
  std::string detail;
  bool ok = catalog.size() == 3;
  for (const auto& [id, entry] : catalog) {
    const auto path = find_goal_path(entry.scenario, 30);
    bool reached = false;
    if (path) {
      auto st = initial_state(entry.scenario);
      for (const auto& step : *path) st = advance(st, entry.scenario, {0, step.event, 1.0}, step.engagement, 0);
      reached = st.goal_reached;
    }
    // Load must reject a copy with one overlapping guard added.
    auto doc = load_json_file(entry.file);
    auto dup = doc["transitions"][0];
    dup["to"] = doc["initial"];
    if (dup.contains("guard") && dup["guard"].contains("engagement_max")) {
      dup["guard"]["engagement_min"] = dup["guard"]["engagement_max"].get<double>() - 0.01;
      dup["guard"].erase("engagement_max");
    }
    doc["transitions"].push_back(dup);
    bool rejected = false;
    try {
      load_scenario(doc, entry.file);
    } catch (const LoadError&) {
      rejected = true;
    }
    ok = ok && reached && path->size() <= 30 && rejected;
    (void)lib;
    detail += id + ": goal in " + (path ? std::to_string(path->size()) : std::string("none")) + " events, overlap " +
              (rejected ? "rejected" : "ACCEPTED") + "; ";
  }
  return {ok, detail};
}

CriterionResult reengagement() {
  const auto persona = test::shipped_persona("distractible");
  const auto woz_script = load_command_script_file(test::data_dir() / "woz" / "never_reengage.json", 500);
  auto mean_for = [&](std::uint64_t seed, bool woz) {
    auto c = test::make_controller("turn_taking", ControllerMode::Autonomous, seed);
    SimulatedUser user(persona, persona_seed(seed));
    SimOptions opts;
    opts.ticks = 500;
    if (woz) opts.script = woz_script;
    return run_session(*c, user, opts).mean_engagement;
  };
  const auto t0 = Clock::now();
  const double auto42 = mean_for(42, false), woz42 = mean_for(42, true);
  int wins = 0;
  double margin_min = 1.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const double a = mean_for(seed, false), w = mean_for(seed, true);
    wins += a > w;
    margin_min = std::min(margin_min, a - w);
  }
  const double took = seconds_since(t0);
  return {auto42 > woz42 && wins >= 45 && took < 60.0,
          "seed 42: autonomous " + fmt(auto42) + " vs WoZ " + fmt(woz42) + "; autonomous wins " +
              std::to_string(wins) + "/50 seeds (smallest margin " + fmt(margin_min) + "); sweep took " + fmt(took) +
              " s"};
}

CriterionResult log_fidelity() {
  auto c = test::make_controller("joint_attention", ControllerMode::Autonomous, 99);
  SimulatedUser user(test::shipped_persona("distractible"), persona_seed(99));
  SimOptions opts;
  opts.ticks = 800;
  opts.script = {{100, SupervisionCommand::set_mode(ControllerMode::Approval)},
                 {180, SupervisionCommand::approve(1)},
                 {200, SupervisionCommand::simple(CommandKind::Pause)},
                 {230, SupervisionCommand::simple(CommandKind::Resume)},
                 {260, SupervisionCommand::set_mode(ControllerMode::WizardOfOz)},
                 {300, SupervisionCommand::override_behavior("praise")},
                 {320, SupervisionCommand::set_mode(ControllerMode::Autonomous)},
                 {400, SupervisionCommand::set_difficulty(1)},
                 {790, SupervisionCommand::simple(CommandKind::Stop)}};
  run_session(*c, user, opts);
  std::ostringstream out;
  export_roboticist(c->log(), out);
  std::istringstream in(out.str());
  const auto parsed = parse_roboticist(in);
  std::ostringstream again;
  export_roboticist(parsed, again);
  const bool lossless = parsed == c->log() && again.str() == out.str();
  const auto report = replay_session(parsed);
  return {lossless && report.ok() && report.ticks == c->log().size(),
          std::to_string(report.ticks) + " ticks replayed, " + std::to_string(report.mismatches.size()) +
              " tag mismatches; export round trip " + (lossless ? "lossless" : "LOSSY")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria{
      {"determinism", determinism},
      {"affect-convergence", affect_convergence},
      {"safety", safety},
      {"platform-independence", platform_independence},
      {"supervised-autonomy", supervised_autonomy},
      {"scenarios", scenarios},
      {"reengagement-vs-woz", reengagement},
      {"log-fidelity", log_fidelity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    CriterionResult o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures ? 1 : 0;
}
