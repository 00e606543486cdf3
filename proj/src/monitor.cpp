#include "carebot/monitor.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "carebot/json_reader.hpp"

namespace carebot {

void sort_rules(std::vector<Rule>& rules) {
  std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.severity_priority, a.id) < std::tie(b.severity_priority, b.id);
  });
}

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) { sort_rules(rules_); }

namespace {

bool valid_unit_pattern(const std::string& p) {
  if (p == "*") return true;
  if (p.ends_with("*")) {
    const auto prefix = std::string_view(p).substr(0, p.size() - 1);
    return std::any_of(kActionUnitVocabulary.begin(), kActionUnitVocabulary.end(),
                       [&](std::string_view id) { return id.starts_with(prefix); });
  }
  return is_registered_unit(p);
}

}  // namespace

RuleSet RuleSet::load(const nlohmann::json& j, const std::string& source) {
  JsonReader root(j, source);
  std::vector<Rule> rules;
  std::set<std::string> ids;
  for (const auto& r : root.at("rules").elements()) {
    Rule rule;
    rule.id = r.at("id").string();
    if (rule.id.empty()) r.at("id").fail("rule id must be non-empty");
    if (!ids.insert(rule.id).second) r.at("id").fail("duplicate rule id '" + rule.id + "'");

    const auto kind_name = r.at("kind").string();
    auto kind = enum_from_string(kind_name, kRuleKindNames);
    if (!kind) r.at("kind").fail("unknown rule kind '" + kind_name + "'");
    rule.kind = *kind;

    rule.subject = r.at("subject").strings();
    if (rule.subject.empty()) r.at("subject").fail("subject must be non-empty");
    rule.severity_priority = static_cast<int>(r.integer_or("severity_priority", 0));
    if (auto src = r.find("source")) {
      rule.source = parse_source(src->string());
      if (!rule.source) src->fail("unknown source '" + src->string() + "'");
    }

    switch (rule.kind) {
      case RuleKind::EthicalVocabulary:
        for (std::size_t i = 0; i < rule.subject.size(); ++i) {
          if (word_tokens(rule.subject[i]).empty()) r.at("subject").at(i).fail("word list entry has no word characters");
        }
        break;
      case RuleKind::EthicalBehaviorBan:
        for (std::size_t i = 0; i < rule.subject.size(); ++i) {
          if (rule.subject[i].empty()) r.at("subject").at(i).fail("empty tag pattern");
        }
        break;
      case RuleKind::TechnicalIntensityCap:
      case RuleKind::TechnicalRateCap: {
        for (std::size_t i = 0; i < rule.subject.size(); ++i) {
          if (!valid_unit_pattern(rule.subject[i])) {
            r.at("subject").at(i).fail("pattern '" + rule.subject[i] + "' matches no registered action unit");
          }
        }
        const double limit = r.at("limit").number();
        if (!(limit > 0.0 && limit <= 1.0)) r.at("limit").fail("cap limit must be in (0, 1]");
        rule.limit = limit;
        break;
      }
    }
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

RuleSet RuleSet::load_file(const std::filesystem::path& file) {
  return load(load_json_file(file), file.string());
}

bool pattern_matches(std::string_view pattern, std::string_view value) {
  if (pattern.ends_with('*')) return value.starts_with(pattern.substr(0, pattern.size() - 1));
  return pattern == value;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_') {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
  const auto words = word_tokens(text);
  const auto needle = word_tokens(phrase);
  if (needle.empty()) return false;
  return std::search(words.begin(), words.end(), needle.begin(), needle.end()) != words.end();
}

namespace {

bool ethical_match(const Rule& rule, const CandidateBehavior& c) {
  if (rule.kind == RuleKind::EthicalVocabulary) {
    if (!c.speech) return false;
    return std::any_of(rule.subject.begin(), rule.subject.end(),
                       [&](const std::string& w) { return contains_phrase(*c.speech, w); });
  }
  const auto tags = split_tags(c.tag);
  return std::any_of(rule.subject.begin(), rule.subject.end(), [&](const std::string& p) {
    return std::any_of(tags.begin(), tags.end(), [&](const std::string& t) { return pattern_matches(p, t); });
  });
}

bool matches_unit(const Rule& rule, std::string_view unit) {
  return std::any_of(rule.subject.begin(), rule.subject.end(),
                     [&](const std::string& p) { return pattern_matches(p, unit); });
}

// Tightens `slot` to `limit`; returns true when it changed.
bool tighten(std::optional<double>& slot, double limit) {
  if (slot && *slot <= limit) return false;
  slot = limit;
  return true;
}

}  // namespace

Verdict vet(const CandidateBehavior& candidate, std::span<const Rule> rules) {
  std::vector<Rule> ordered(rules.begin(), rules.end());
  sort_rules(ordered);

  Verdict verdict;
  for (const auto& rule : ordered) {
    if (rule.source && *rule.source != candidate.source) continue;
    if (is_ethical(rule.kind) && ethical_match(rule, candidate)) verdict.reasons.push_back(rule.id);
  }
  if (!verdict.reasons.empty()) {
    verdict.outcome = Outcome::Veto;
    return verdict;
  }

  CandidateBehavior modified = candidate;
  for (const auto& rule : ordered) {
    if (is_ethical(rule.kind)) continue;
    if (rule.source && *rule.source != candidate.source) continue;
    const double limit = *rule.limit;
    bool changed = false;
    for (auto& unit : modified.units) {
      if (!matches_unit(rule, unit.id)) continue;
      auto& annotation = modified.limits[unit.id];
      if (rule.kind == RuleKind::TechnicalIntensityCap) {
        if (unit.intensity > limit) {
          unit.intensity = limit;
          changed = true;
        }
        changed |= tighten(annotation.max_intensity, limit);
      } else {
        changed |= tighten(annotation.max_rate, limit);
      }
    }
    if (changed) verdict.reasons.push_back(rule.id);
  }
  if (!verdict.reasons.empty()) {
    verdict.outcome = Outcome::Clamp;
    verdict.modified = std::move(modified);
  }
  return verdict;
}

}  // namespace carebot
