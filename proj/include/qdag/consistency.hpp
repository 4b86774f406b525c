#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "qdag/answer.hpp"
#include "qdag/decomposer.hpp"
#include "qdag/question_type.hpp"

namespace qdag {

enum class Verdict : std::uint8_t { Pass, Fail, NotApplicable };
std::string_view to_string(Verdict v);

/// Parent answer the rule's -yes/-no variant is keyed on.
enum class Polarity : std::uint8_t { Yes, No, Object, Temporal };

struct ConsistencyRule {
  std::string_view id;
  CompositionRule composition;
  Polarity parent_polarity;
};

/// The fixed rule catalog, in report order.
const std::vector<ConsistencyRule>& rule_catalog();
const ConsistencyRule* find_rule(std::string_view id);
/// Rules attached to a composition rule (empty for first/last/longer/shorterChoose).
std::vector<std::string_view> rules_for(CompositionRule r);

struct CheckTemplate {
  std::string rule_id;
  std::string parent;                 // node id
  std::vector<std::string> children;  // node ids in argument order
};

struct CheckInstance {
  CheckTemplate check;
  Verdict verdict;
};

/// Answers keyed by question id.
using PredictionSet = std::unordered_map<std::string, Answer>;
/// Answer for a DAG node id, if any.
using AnswerLookup = std::function<std::optional<Answer>(const std::string& node_id)>;

/// Looks node answers up through their question ids.
AnswerLookup lookup_in(const QuestionDag& dag, const PredictionSet& pred);

/// One template per (rule, parent) pair. Checks touching a banned node are
/// never produced.
std::vector<CheckTemplate> instantiate_checks(const QuestionDag& dag,
                                              const BanList& bans = BanList());

/// Pass iff antecedent and consequent hold; fail iff antecedent holds and
/// consequent does not; not applicable if the antecedent is false or any
/// referenced answer is missing.
Verdict evaluate_check(const CheckTemplate& t, const QuestionDag& dag, const AnswerLookup& answers);

struct ConsistencyCounts {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t not_applicable = 0;
};

ConsistencyCounts dag_consistency(const QuestionDag& dag, const AnswerLookup& answers,
                                  const BanList& bans = BanList());

std::vector<CheckInstance> evaluate_all(const QuestionDag& dag, const AnswerLookup& answers,
                                        const BanList& bans = BanList());

/// Violation-dump line for one evaluated check.
nlohmann::json violation_json(const QuestionDag& dag, const CheckInstance& c);

}  // namespace qdag
