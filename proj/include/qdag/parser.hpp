#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qdag/program.hpp"
#include "qdag/vocabulary.hpp"

namespace qdag {

class ParseError : public std::runtime_error {
 public:
  enum class Kind : std::uint8_t { Syntax, UnknownFunction, Arity, Variant, UnknownLabel };

  ParseError(Kind kind, std::size_t position, const std::string& msg);

  Kind kind() const { return kind_; }
  /// Byte offset into the input where the problem was detected.
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Parses `name(arg, ..., arg)` program text. Label atoms are bare words and
/// may contain spaces; they are lowercased and whitespace-normalized.
ProgramPtr parse_program(std::string_view text);

/// As above, and additionally rejects labels absent from `vocab`.
ProgramPtr parse_program(std::string_view text, const Vocabulary& vocab);

/// Canonical text form; parse_program(render_program(p)) == p.
std::string render_program(const Program& p);

/// Deduplication key: equal for structurally equal programs only.
std::string canonical_key(const Program& p);

}  // namespace qdag
