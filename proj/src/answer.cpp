#include "qdag/answer.hpp"

#include <stdexcept>

namespace qdag {

Answer Answer::label(std::string_view text) {
  auto canon = canonical_label(text);
  if (canon.empty()) throw std::invalid_argument("empty label answer");
  return Answer(std::move(canon));
}

AnswerKind Answer::kind() const {
  if (is_bool()) return AnswerKind::Bool;
  if (is_temporal()) return AnswerKind::Temporal;
  return AnswerKind::Label;
}

std::string Answer::to_string() const {
  if (is_bool()) return as_bool() ? "yes" : "no";
  if (is_temporal()) return as_temporal() == TemporalToken::Before ? "before" : "after";
  return as_label();
}

Answer parse_answer(std::string_view text, AnswerKind kind) {
  const auto canon = canonical_label(text);
  switch (kind) {
    case AnswerKind::Bool:
      if (canon == "yes") return Answer::yes();
      if (canon == "no") return Answer::no();
      break;
    case AnswerKind::Temporal:
      if (canon == "before") return Answer::temporal(TemporalToken::Before);
      if (canon == "after") return Answer::temporal(TemporalToken::After);
      break;
    case AnswerKind::Label:
      break;
  }
  return Answer::label(canon);
}

}  // namespace qdag
