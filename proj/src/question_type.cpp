#include "qdag/question_type.hpp"

#include <stdexcept>
#include <string>

namespace qdag {

std::string_view to_string(QuestionType t) {
  switch (t) {
    case QuestionType::ObjectExists: return "objectExists";
    case QuestionType::RelationExists: return "relationExists";
    case QuestionType::Interaction: return "interaction";
    case QuestionType::InteractionTemporalLoc: return "interactionTemporalLoc";
    case QuestionType::ExistsTemporalLoc: return "existsTemporalLoc";
    case QuestionType::FirstLast: return "firstLast";
    case QuestionType::LongestShortestAction: return "longestShortestAction";
    case QuestionType::Conjunction: return "conjunction";
    case QuestionType::Choose: return "choose";
    case QuestionType::Equals: return "equals";
    case QuestionType::ObjectsQuery: return "objectsQuery";
    case QuestionType::ActionTemporalLoc: return "actionTemporalLoc";
  }
  return "?";
}

std::string_view display_name(QuestionType t) {
  switch (t) {
    case QuestionType::ObjectExists: return "Object Exists";
    case QuestionType::RelationExists: return "Relation Exists";
    case QuestionType::Interaction: return "Interaction";
    case QuestionType::InteractionTemporalLoc: return "Interaction Temporal Loc.";
    case QuestionType::ExistsTemporalLoc: return "Exists Temporal Loc.";
    case QuestionType::FirstLast: return "First/Last";
    case QuestionType::LongestShortestAction: return "Longest/Shortest Action";
    case QuestionType::Conjunction: return "Conjunction";
    case QuestionType::Choose: return "Choose";
    case QuestionType::Equals: return "Equals";
    case QuestionType::ObjectsQuery: return "Objects";
    case QuestionType::ActionTemporalLoc: return "Action Temporal Loc.";
  }
  return "?";
}

std::optional<QuestionType> parse_question_type(std::string_view name) {
  for (auto t : kAllQuestionTypes)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

QuestionType classify(const Program& p) {
  switch (p.op()) {
    case Op::ObjExists: return QuestionType::ObjectExists;
    case Op::RelationExists: return QuestionType::RelationExists;
    // Actions are person-verb-object events; they score with interactions.
    case Op::ActionExists:
    case Op::InteractionExists:
      return QuestionType::Interaction;
    case Op::ObjectsQuery: return QuestionType::ObjectsQuery;
    case Op::ActionsQuery: return QuestionType::ActionTemporalLoc;
    case Op::First:
    case Op::Last:
      return QuestionType::FirstLast;
    case Op::Longest:
    case Op::Shortest:
      return QuestionType::LongestShortestAction;
    case Op::And:
    case Op::Xor:
      return QuestionType::Conjunction;
    case Op::EqualsObject:
    case Op::LongerThan:
    case Op::ShorterThan:
      return QuestionType::Equals;
    case Op::ChooseObject:
    case Op::ChooseTime:
    case Op::LongerChoose:
    case Op::ShorterChoose:
      return QuestionType::Choose;
    case Op::OccursBefore:
    case Op::OccursAfter:
      return p.arg(0).op() == Op::InteractionExists || p.arg(0).op() == Op::ActionExists
                 ? QuestionType::InteractionTemporalLoc
                 : QuestionType::ExistsTemporalLoc;
    case Op::Localized:
      switch (p.arg(0).op()) {
        case Op::ObjectsQuery: return QuestionType::ObjectsQuery;
        case Op::ActionsQuery: return QuestionType::ActionTemporalLoc;
        case Op::InteractionExists:
        case Op::ActionExists:
          return QuestionType::InteractionTemporalLoc;
        default:
          return QuestionType::ExistsTemporalLoc;
      }
  }
  return QuestionType::ObjectExists;
}

BanList::BanList() : banned_{QuestionType::ObjectsQuery, QuestionType::ActionTemporalLoc} {}

BanList BanList::parse(std::string_view csv) {
  std::set<QuestionType> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    auto item = csv.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const auto t = parse_question_type(item);
      if (!t) throw std::invalid_argument("unknown question type '" + std::string(item) + "'");
      out.insert(*t);
    }
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  return BanList(std::move(out));
}

}  // namespace qdag
