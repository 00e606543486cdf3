#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "carebot/behavior.hpp"

namespace carebot {

enum class RuleKind { EthicalVocabulary, EthicalBehaviorBan, TechnicalIntensityCap, TechnicalRateCap };

inline constexpr std::array<EnumName<RuleKind>, 4> kRuleKindNames{{
    {RuleKind::EthicalVocabulary, "ethical_vocabulary"},
    {RuleKind::EthicalBehaviorBan, "ethical_behavior_ban"},
    {RuleKind::TechnicalIntensityCap, "technical_intensity_cap"},
    {RuleKind::TechnicalRateCap, "technical_rate_cap"},
}};
inline std::string_view to_string(RuleKind k) { return enum_to_string(k, kRuleKindNames); }

inline bool is_ethical(RuleKind k) {
  return k == RuleKind::EthicalVocabulary || k == RuleKind::EthicalBehaviorBan;
}

/// `subject` holds words/phrases (vocabulary), tag patterns (ban) or action
/// unit patterns (caps). Patterns are exact ids or a prefix ending in '*'.
struct Rule {
  std::string id;
  RuleKind kind = RuleKind::EthicalVocabulary;
  std::vector<std::string> subject;
  std::optional<double> limit;
  int severity_priority = 0;
  std::optional<Source> source;  // restricts the rule to one layer when set

  bool operator==(const Rule&) const = default;
};

enum class Outcome { Allow, Clamp, Veto };

inline constexpr std::array<EnumName<Outcome>, 3> kOutcomeNames{{
    {Outcome::Allow, "allow"},
    {Outcome::Clamp, "clamp"},
    {Outcome::Veto, "veto"},
}};
inline std::string_view to_string(Outcome o) { return enum_to_string(o, kOutcomeNames); }
inline std::optional<Outcome> parse_outcome(std::string_view s) { return enum_from_string(s, kOutcomeNames); }

struct Verdict {
  Outcome outcome = Outcome::Allow;
  std::optional<CandidateBehavior> modified;
  std::vector<std::string> reasons;
};

/// Rules in application order: ascending severity_priority, ties by id.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  static RuleSet load(const nlohmann::json& j, const std::string& source);
  static RuleSet load_file(const std::filesystem::path& file);

  std::span<const Rule> rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

void sort_rules(std::vector<Rule>& rules);

bool pattern_matches(std::string_view pattern, std::string_view value);

/// Lower-cased word tokens ([a-z0-9_] runs).
std::vector<std::string> word_tokens(std::string_view text);

/// True when `phrase` occurs in `text` on word boundaries, ignoring case.
bool contains_phrase(std::string_view text, std::string_view phrase);

/// Applies `rules` to one candidate. Ethical matches veto; otherwise caps
/// clamp unit intensities and attach limit annotations for fusion to enforce.
/// The result does not depend on the order of `rules`.
Verdict vet(const CandidateBehavior& candidate, std::span<const Rule> rules);

}  // namespace carebot
