#pragma once

#include <array>
#include <optional>
#include <set>
#include <string_view>

#include "qdag/program.hpp"

namespace qdag {

/// Evaluation taxonomy of question programs.
enum class QuestionType : std::uint8_t {
  ObjectExists,
  RelationExists,
  Interaction,
  InteractionTemporalLoc,
  ExistsTemporalLoc,
  FirstLast,
  LongestShortestAction,
  Conjunction,
  Choose,
  Equals,
  ObjectsQuery,
  ActionTemporalLoc,
};

inline constexpr std::array<QuestionType, 12> kAllQuestionTypes{
    QuestionType::ObjectExists,       QuestionType::RelationExists,
    QuestionType::Interaction,        QuestionType::InteractionTemporalLoc,
    QuestionType::ExistsTemporalLoc,  QuestionType::FirstLast,
    QuestionType::LongestShortestAction, QuestionType::Conjunction,
    QuestionType::Choose,             QuestionType::Equals,
    QuestionType::ObjectsQuery,       QuestionType::ActionTemporalLoc,
};

std::string_view to_string(QuestionType t);
std::optional<QuestionType> parse_question_type(std::string_view name);

/// Display name used in report tables ("Object Exists", ...).
std::string_view display_name(QuestionType t);

/// Pure function of the root variant (and a Localized wrapper's body).
QuestionType classify(const Program& p);

/// Question types excluded from scoring.
class BanList {
 public:
  /// objectsQuery and actionTemporalLoc.
  BanList();
  explicit BanList(std::set<QuestionType> banned) : banned_(std::move(banned)) {}

  /// Parses a comma-separated list of type names; empty text bans nothing.
  static BanList parse(std::string_view csv);

  bool banned(QuestionType t) const { return banned_.contains(t); }
  const std::set<QuestionType>& types() const { return banned_; }

 private:
  std::set<QuestionType> banned_;
};

}  // namespace qdag
