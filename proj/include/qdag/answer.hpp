#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "qdag/program.hpp"

namespace qdag {

enum class TemporalToken : std::uint8_t { Before, After };

/// A yes/no answer, an object/action label, or a before/after token.
class Answer {
 public:
  static Answer yes() { return Answer(true); }
  static Answer no() { return Answer(false); }
  static Answer boolean(bool v) { return Answer(v); }
  static Answer label(std::string_view text);
  static Answer temporal(TemporalToken t) { return Answer(t); }

  AnswerKind kind() const;
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_yes() const { return is_bool() && std::get<bool>(value_); }
  bool is_no() const { return is_bool() && !std::get<bool>(value_); }
  bool is_label() const { return std::holds_alternative<std::string>(value_); }
  bool is_temporal() const { return std::holds_alternative<TemporalToken>(value_); }

  bool as_bool() const { return std::get<bool>(value_); }
  const std::string& as_label() const { return std::get<std::string>(value_); }
  TemporalToken as_temporal() const { return std::get<TemporalToken>(value_); }

  /// "yes" / "no" / label / "before" / "after".
  std::string to_string() const;

  friend bool operator==(const Answer&, const Answer&) = default;

 private:
  explicit Answer(bool v) : value_(v) {}
  explicit Answer(std::string v) : value_(std::move(v)) {}
  explicit Answer(TemporalToken t) : value_(t) {}

  std::variant<bool, std::string, TemporalToken> value_;
};

/// Reads an answer string as the given kind. Bool and Temporal kinds accept
/// only their fixed alphabets; any other text is kept as a label so that
/// off-alphabet model outputs still compare unequal to the gold answer.
Answer parse_answer(std::string_view text, AnswerKind kind);

}  // namespace qdag
