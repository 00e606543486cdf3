#include "carebot/scenario.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include "carebot/json_reader.hpp"

namespace carebot {

bool Guard::admits(double engagement) const {
  return engagement >= engagement_min && (!engagement_max || engagement < *engagement_max);
}

bool Guard::overlaps(const Guard& other) const {
  const bool this_below = engagement_max && *engagement_max <= other.engagement_min;
  const bool other_below = other.engagement_max && *other.engagement_max <= engagement_min;
  return !this_below && !other_below;
}

const StateDef* Scenario::find_state(std::string_view name) const {
  auto it = std::find_if(states.begin(), states.end(), [&](const StateDef& s) { return s.name == name; });
  return it == states.end() ? nullptr : &*it;
}

std::vector<std::string> Scenario::entry_behaviors() const {
  std::vector<std::string> out;
  for (const auto& s : states) {
    if (s.entry) out.push_back(s.entry->behavior);
  }
  return out;
}

std::vector<GuardOverlap> find_guard_overlaps(const Scenario& scenario) {
  std::vector<GuardOverlap> out;
  const auto& ts = scenario.transitions;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (ts[i].from == ts[j].from && ts[i].on == ts[j].on && ts[i].guard.overlaps(ts[j].guard)) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

Scenario load_scenario(const nlohmann::json& j, const std::string& source) {
  JsonReader root(j, source);
  Scenario sc;
  sc.id = root.at("id").string();
  sc.description = root.string_or("description", "");
  sc.counters = root.at("counters").strings();
  sc.tokens = root.has("tokens") ? root.at("tokens").strings() : std::vector<std::string>{};

  std::set<std::string> counters(sc.counters.begin(), sc.counters.end());
  if (counters.size() != sc.counters.size()) root.at("counters").fail("duplicate counter name");

  std::set<std::string> names;
  bool needs_tokens = false;
  for (const auto& s : root.at("states").elements()) {
    StateDef def;
    def.name = s.at("name").string();
    if (!names.insert(def.name).second) s.at("name").fail("duplicate state '" + def.name + "'");
    if (auto e = s.find("entry")) {
      EntryAction a;
      a.behavior = e->at("behavior").string();
      a.expects_response = e->boolean_or("expects_response", false);
      if (auto tok = e->find("token")) a.fixed_token = tok->string();
      needs_tokens |= a.expects_response && !a.fixed_token;
      def.entry = std::move(a);
    }
    sc.states.push_back(std::move(def));
  }
  if (sc.states.empty()) root.at("states").fail("a scenario needs at least one state");

  sc.initial = root.at("initial").string();
  if (!names.contains(sc.initial)) root.at("initial").fail("initial state '" + sc.initial + "' is not declared");
  if (auto g = root.find("goal_state")) {
    sc.goal_state = g->string();
    if (!names.contains(*sc.goal_state)) g->fail("goal state '" + *sc.goal_state + "' is not declared");
  }

  for (const auto& t : root.at("transitions").elements()) {
    Transition tr;
    tr.from = t.at("from").string();
    if (!names.contains(tr.from)) t.at("from").fail("transition from undeclared state '" + tr.from + "'");
    tr.to = t.at("to").string();
    if (!names.contains(tr.to)) t.at("to").fail("transition to undeclared state '" + tr.to + "'");
    auto kind = parse_event_kind(t.at("on").string());
    if (!kind) t.at("on").fail("unknown event kind '" + t.at("on").string() + "'");
    tr.on = *kind;
    if (auto g = t.find("guard")) {
      if (g->has("engagement_min")) tr.guard.engagement_min = g->at("engagement_min").number_in(0, 1);
      if (g->has("engagement_max")) tr.guard.engagement_max = g->at("engagement_max").number_in(0, 1);
      if (tr.guard.engagement_max && *tr.guard.engagement_max <= tr.guard.engagement_min) {
        g->fail("empty guard: engagement_max must exceed engagement_min");
      }
    }
    if (auto inc = t.find("increment")) {
      tr.increments = inc->strings();
      for (std::size_t i = 0; i < tr.increments.size(); ++i) {
        if (!counters.contains(tr.increments[i])) inc->at(i).fail("undeclared counter '" + tr.increments[i] + "'");
      }
    }
    sc.transitions.push_back(std::move(tr));
  }

  for (const auto& g : root.at("goal").elements()) {
    GoalCondition c;
    c.counter = g.at("counter").string();
    if (!counters.contains(c.counter)) g.at("counter").fail("goal references undeclared counter '" + c.counter + "'");
    c.at_least = g.at("at_least").integer();
    if (c.at_least < 0) g.at("at_least").fail("threshold must be >= 0");
    sc.goal.push_back(std::move(c));
  }
  if (sc.goal.empty()) root.at("goal").fail("a scenario needs a goal condition");

  for (const auto& l : root.at("difficulty").elements()) {
    DifficultyLevel lvl;
    lvl.prompt_delay = l.at("prompt_delay").integer();
    if (lvl.prompt_delay < 1) l.at("prompt_delay").fail("prompt delay must be >= 1 tick");
    lvl.token_set_size = static_cast<int>(l.integer_or("token_set_size", 1));
    if (lvl.token_set_size < 1) l.at("token_set_size").fail("token set size must be >= 1");
    if (needs_tokens && static_cast<std::size_t>(lvl.token_set_size) > sc.tokens.size()) {
      l.at("token_set_size").fail("token set size exceeds the number of declared tokens");
    }
    sc.levels.push_back(lvl);
  }
  if (sc.levels.empty()) root.at("difficulty").fail("a scenario needs at least one difficulty level");

  if (auto p = root.find("perception")) {
    PerceptionConfig probe;
    apply_perception_overrides(probe, p->raw(), source);  // validates
    sc.perception_overrides = p->raw();
  }
  if (auto d = root.find("deliberation")) {
    if (d->has("engage_threshold")) {
      const double th = d->at("engage_threshold").number();
      if (!(th > 0.0 && th < 1.0)) d->at("engage_threshold").fail("threshold must be in (0, 1)");
      sc.engage_threshold = th;
    }
  }

  if (auto overlaps = find_guard_overlaps(sc); !overlaps.empty()) {
    const auto& o = overlaps.front();
    root.at("transitions").at(o.second).fail("guard overlaps transition " + std::to_string(o.first) +
                                             " on the same state and event; exactly one transition may fire");
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& file) {
  return load_scenario(load_json_file(file), file.string());
}

void check_behaviors(const Scenario& scenario, const BehaviorLibrary& library, const std::string& source) {
  for (std::size_t i = 0; i < scenario.states.size(); ++i) {
    const auto& s = scenario.states[i];
    if (s.entry && !library.contains(s.entry->behavior)) {
      throw LoadError(source, "$.states[" + std::to_string(i) + "].entry.behavior",
                      "behavior '" + s.entry->behavior + "' is not in the behavior library");
    }
  }
}

namespace {

void enter(ScenarioState& st, const Scenario& sc, const std::string& name, Tick now) {
  st.current = name;
  st.pending.reset();
  const auto* def = sc.find_state(name);
  if (!def || !def->entry) return;
  ScenarioAction action{def->entry->behavior, std::nullopt};
  if (def->entry->expects_response) {
    if (def->entry->fixed_token) {
      action.expected_token = def->entry->fixed_token;
    } else {
      const auto size = static_cast<std::int64_t>(sc.levels.at(static_cast<std::size_t>(st.difficulty)).token_set_size);
      action.expected_token = sc.tokens.at(static_cast<std::size_t>(st.prompts_entered % size));
    }
    ++st.prompts_entered;
  }
  st.pending = std::move(action);
  st.action_ready_tick = now;
}

}  // namespace

ScenarioState initial_state(const Scenario& scenario, Tick now) {
  ScenarioState st;
  for (const auto& c : scenario.counters) st.counters[c] = 0;
  enter(st, scenario, scenario.initial, now);
  return st;
}

bool goal_holds(const Scenario& scenario, const std::map<std::string, std::int64_t>& counters) {
  return std::all_of(scenario.goal.begin(), scenario.goal.end(), [&](const GoalCondition& g) {
    auto it = counters.find(g.counter);
    return it != counters.end() && it->second >= g.at_least;
  });
}

ScenarioState advance(const ScenarioState& state, const Scenario& scenario, const InteractionEvent& event,
                      double engagement, Tick now) {
  const Transition* fired = nullptr;
  for (const auto& t : scenario.transitions) {
    if (t.from == state.current && t.on == event.kind && t.guard.admits(engagement)) {
      fired = &t;
      break;  // guards are disjoint, so this is the only match
    }
  }
  if (!fired) return state;

  ScenarioState next = state;
  for (const auto& c : fired->increments) ++next.counters[c];
  enter(next, scenario, fired->to, now);
  if (!next.goal_reached && goal_holds(scenario, next.counters)) {
    next.goal_reached = true;
    if (scenario.goal_state) enter(next, scenario, *scenario.goal_state, now);
  }
  return next;
}

ScenarioState adjust_difficulty(const ScenarioState& state, const Scenario& scenario, double performance,
                                Tick now, const DifficultyPolicy& policy) {
  if (state.last_difficulty_change && now - *state.last_difficulty_change < policy.hysteresis_ticks) return state;
  const int top = static_cast<int>(scenario.levels.size()) - 1;
  int level = state.difficulty;
  if (performance >= policy.raise_at) {
    level = std::min(level + 1, top);
  } else if (performance <= policy.lower_at) {
    level = std::max(level - 1, 0);
  }
  if (level == state.difficulty) return state;
  ScenarioState next = state;
  next.difficulty = level;
  next.last_difficulty_change = now;
  return next;
}

ScenarioState set_difficulty(const ScenarioState& state, const Scenario& scenario, int level, Tick now) {
  ScenarioState next = state;
  next.difficulty = std::clamp(level, 0, static_cast<int>(scenario.levels.size()) - 1);
  next.last_difficulty_change = now;
  return next;
}

std::optional<ScenarioAction> due_action(const ScenarioState& state, Tick now) {
  if (state.pending && now >= state.action_ready_tick) return state.pending;
  return std::nullopt;
}

ScenarioState mark_action_issued(const ScenarioState& state, const Scenario& scenario, Tick now) {
  ScenarioState next = state;
  if (!next.pending) return next;
  if (next.pending->expected_token) {
    next.action_ready_tick = now + scenario.levels.at(static_cast<std::size_t>(next.difficulty)).prompt_delay;
  } else {
    next.pending.reset();
  }
  return next;
}

std::optional<std::vector<ScenarioStep>> find_goal_path(const Scenario& scenario, std::size_t max_length) {
  // Representative engagement values: every guard lower bound (inclusive) plus
  // the ends of the range hit every guard interval that is non-empty on [0,1].
  std::set<double> probes{0.0, 1.0};
  for (const auto& t : scenario.transitions) probes.insert(t.guard.engagement_min);

  using Key = std::tuple<std::string, std::map<std::string, std::int64_t>, bool>;
  struct Node {
    ScenarioState state;
    std::vector<ScenarioStep> path;
  };
  auto key_of = [](const ScenarioState& s) { return Key{s.current, s.counters, s.goal_reached}; };

  const auto start = initial_state(scenario);
  if (goal_holds(scenario, start.counters)) return std::vector<ScenarioStep>{};

  std::set<Key> seen{key_of(start)};
  std::deque<Node> frontier{{start, {}}};
  while (!frontier.empty()) {
    Node node = std::move(frontier.front());
    frontier.pop_front();
    if (node.path.size() >= max_length) continue;
    for (const auto& kind_entry : kEventKindNames) {
      for (double e : probes) {
        auto next = advance(node.state, scenario, {0, kind_entry.value, 1.0}, e, 0);
        if (!seen.insert(key_of(next)).second) continue;
        auto path = node.path;
        path.push_back({kind_entry.value, e});
        if (next.goal_reached) return path;
        frontier.push_back({std::move(next), std::move(path)});
      }
    }
  }
  return std::nullopt;
}

nlohmann::json to_json(const ScenarioState& s) {
  nlohmann::json pending = nullptr;
  if (s.pending) {
    pending = {{"behavior", s.pending->behavior}};
    put_optional(pending, "expected_token", s.pending->expected_token);
  }
  nlohmann::json j{{"current", s.current},
                   {"counters", s.counters},
                   {"difficulty", s.difficulty},
                   {"goal_reached", s.goal_reached},
                   {"pending", pending},
                   {"action_ready_tick", s.action_ready_tick},
                   {"prompts_entered", s.prompts_entered}};
  put_optional(j, "last_difficulty_change", s.last_difficulty_change);
  return j;
}

ScenarioState scenario_state_from_json(const nlohmann::json& j) {
  ScenarioState s;
  s.current = j.at("current").get<std::string>();
  s.counters = j.at("counters").get<std::map<std::string, std::int64_t>>();
  s.difficulty = j.at("difficulty").get<int>();
  s.goal_reached = j.at("goal_reached").get<bool>();
  if (!j.at("pending").is_null()) {
    s.pending = ScenarioAction{j["pending"].at("behavior").get<std::string>(),
                               get_optional<std::string>(j["pending"], "expected_token")};
  }
  s.action_ready_tick = j.at("action_ready_tick").get<Tick>();
  s.prompts_entered = j.at("prompts_entered").get<std::int64_t>();
  s.last_difficulty_change = get_optional<Tick>(j, "last_difficulty_change");
  return s;
}

}  // namespace carebot
