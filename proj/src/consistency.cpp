#include "qdag/consistency.hpp"

#include <algorithm>

namespace qdag {

namespace {

using CR = CompositionRule;

const std::vector<ConsistencyRule> kCatalog{
    {"interaction-yes", CR::Interaction, Polarity::Yes},
    {"interaction-no", CR::Interaction, Polarity::No},
    {"after-yes", CR::After, Polarity::Yes},
    {"after-no", CR::After, Polarity::No},
    {"before-yes", CR::Before, Polarity::Yes},
    {"before-no", CR::Before, Polarity::No},
    {"while-yes", CR::While, Polarity::Yes},
    {"while-no", CR::While, Polarity::No},
    {"between-yes", CR::Between, Polarity::Yes},
    {"between-no", CR::Between, Polarity::No},
    {"and-yes", CR::And, Polarity::Yes},
    {"and-no", CR::And, Polarity::No},
    {"xor-yes", CR::Xor, Polarity::Yes},
    {"xor-no", CR::Xor, Polarity::No},
    {"equals-yes", CR::Equals, Polarity::Yes},
    {"equals-no", CR::Equals, Polarity::No},
    {"choose-object", CR::Choose, Polarity::Object},
    {"choose-temporal", CR::Choose, Polarity::Temporal},
};

bool is_temporal_parent(const Program& p) {
  if (p.op() == Op::OccursBefore || p.op() == Op::OccursAfter) return true;
  return p.op() == Op::Localized && is_boolean(p.arg(0));
}

bool yes(const Answer& a) { return a.is_yes(); }
bool no(const Answer& a) { return a.is_no(); }

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::NotApplicable:
      return "not_applicable";
  }
  return "";
}

const std::vector<ConsistencyRule>& rule_catalog() { return kCatalog; }

const ConsistencyRule* find_rule(std::string_view id) {
  for (const auto& r : kCatalog)
    if (r.id == id) return &r;
  return nullptr;
}

std::vector<std::string_view> rules_for(CompositionRule c) {
  std::vector<std::string_view> out;
  for (const auto& r : kCatalog)
    if (r.composition == c) out.push_back(r.id);
  return out;
}

AnswerLookup lookup_in(const QuestionDag& dag, const PredictionSet& pred) {
  return [&dag, &pred](const std::string& node_id) -> std::optional<Answer> {
    const auto* n = dag.find(node_id);
    if (!n) return std::nullopt;
    const auto it = pred.find(n->question_id);
    if (it == pred.end()) return std::nullopt;
    return it->second;
  };
}

std::vector<CheckTemplate> instantiate_checks(const QuestionDag& dag, const BanList& bans) {
  std::vector<CheckTemplate> out;
  for (const auto& n : dag.nodes) {
    const Program& p = *n.program;
    std::vector<std::string_view> ids;
    if (p.op() == Op::InteractionExists) {
      ids = {"interaction-yes", "interaction-no"};
    } else if (is_temporal_parent(p)) {
      ids = rules_for(*composition_rule(p));
    } else if (p.op() == Op::And) {
      ids = {"and-yes", "and-no"};
    } else if (p.op() == Op::Xor) {
      ids = {"xor-yes", "xor-no"};
    } else if (p.op() == Op::EqualsObject) {
      ids = {"equals-yes", "equals-no"};
    } else if (p.op() == Op::ChooseObject) {
      ids = {"choose-object"};
    } else if (p.op() == Op::ChooseTime) {
      ids = {"choose-temporal"};
    }
    if (ids.empty()) continue;
    if (bans.banned(n.qtype)) continue;
    if (std::any_of(n.args.begin(), n.args.end(),
                    [&](const std::string& c) { return bans.banned(dag.node(c).qtype); }))
      continue;
    for (auto id : ids) out.push_back({std::string(id), n.id, n.args});
  }
  return out;
}

Verdict evaluate_check(const CheckTemplate& t, const QuestionDag& dag, const AnswerLookup& answers) {
  const auto parent = answers(t.parent);
  if (!parent) return Verdict::NotApplicable;
  std::vector<Answer> kids;
  for (const auto& c : t.children) {
    auto a = answers(c);
    if (!a) return Verdict::NotApplicable;
    kids.push_back(std::move(*a));
  }
  auto verdict = [](bool antecedent, auto consequent) {
    if (!antecedent) return Verdict::NotApplicable;
    return consequent() ? Verdict::Pass : Verdict::Fail;
  };
  const auto all_yes = [&] { return std::all_of(kids.begin(), kids.end(), yes); };
  const auto any_no = std::any_of(kids.begin(), kids.end(), no);
  const auto& rule = *find_rule(t.rule_id);
  const Program& p = *dag.node(t.parent).program;

  switch (rule.composition) {
    case CR::Interaction:
    case CR::After:
    case CR::Before:
    case CR::While:
    case CR::Between:
      if (rule.parent_polarity == Polarity::Yes) return verdict(yes(*parent), all_yes);
      return verdict(any_no, [&] { return no(*parent); });
    case CR::And:
      if (rule.parent_polarity == Polarity::Yes) return verdict(yes(*parent), all_yes);
      return verdict(no(*parent), [&] { return any_no; });
    case CR::Xor:
      if (rule.parent_polarity == Polarity::Yes)
        return verdict(yes(*parent), [&] { return yes(kids[0]) && no(kids[1]); });
      return verdict(no(*parent), [&] { return no(kids[0]) || yes(kids[1]); });
    case CR::Equals: {
      // children: [exists-candidate, open query]
      const auto& candidate = p.arg(0).label();
      const bool matches = kids[1].is_label() && kids[1].as_label() == candidate;
      if (rule.parent_polarity == Polarity::Yes)
        return verdict(yes(*parent), [&] { return matches && yes(kids[0]); });
      return verdict(no(*parent), [&] { return !matches; });
    }
    case CR::Choose:
      if (rule.parent_polarity == Polarity::Object) {
        const auto& c1 = p.arg(0).arg(0).label();
        const auto& c2 = p.arg(1).arg(0).label();
        const bool applies = parent->is_label() && (parent->as_label() == c1 || parent->as_label() == c2);
        const std::size_t pick = applies && parent->as_label() == c1 ? 0 : 1;
        return verdict(applies, [&] { return yes(kids[pick]) && no(kids[1 - pick]); });
      } else {
        const std::size_t pick =
            parent->is_temporal() && parent->as_temporal() == TemporalToken::Before ? 0 : 1;
        return verdict(parent->is_temporal(),
                       [&] { return yes(kids[pick]) && no(kids[1 - pick]); });
      }
    default:
      return Verdict::NotApplicable;
  }
}

std::vector<CheckInstance> evaluate_all(const QuestionDag& dag, const AnswerLookup& answers,
                                        const BanList& bans) {
  std::vector<CheckInstance> out;
  for (auto& t : instantiate_checks(dag, bans)) {
    const auto v = evaluate_check(t, dag, answers);
    out.push_back({std::move(t), v});
  }
  return out;
}

ConsistencyCounts dag_consistency(const QuestionDag& dag, const AnswerLookup& answers,
                                  const BanList& bans) {
  ConsistencyCounts c;
  for (const auto& t : instantiate_checks(dag, bans)) {
    switch (evaluate_check(t, dag, answers)) {
      case Verdict::Pass:
        ++c.passed;
        break;
      case Verdict::Fail:
        ++c.failed;
        break;
      case Verdict::NotApplicable:
        ++c.not_applicable;
        break;
    }
  }
  return c;
}

nlohmann::json violation_json(const QuestionDag& dag, const CheckInstance& c) {
  auto qid = [&](const std::string& node_id) {
    const auto& n = dag.node(node_id);
    return n.question_id.empty() ? dag.video_id + "#" + n.id : n.question_id;
  };
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& k : c.check.children) kids.push_back(qid(k));
  return {{"dag_root", qid(dag.root_id())},
          {"rule_id", c.check.rule_id},
          {"parent", qid(c.check.parent)},
          {"children", std::move(kids)},
          {"verdict", to_string(c.verdict)}};
}

}  // namespace qdag
