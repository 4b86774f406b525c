#include "qdag/parser.hpp"

#include <cctype>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

namespace qdag {

ParseError::ParseError(Kind kind, std::size_t position, const std::string& msg)
    : std::runtime_error(msg + " (at offset " + std::to_string(position) + ")"),
      kind_(kind),
      position_(position) {}

namespace {

struct FunctionSpec {
  Op op;
  std::optional<Localizer> loc;
  std::size_t arity;
  bool takes_labels;
};

const std::unordered_map<std::string_view, FunctionSpec>& function_table() {
  static const std::unordered_map<std::string_view, FunctionSpec> table{
      {"objExists", {Op::ObjExists, {}, 1, true}},
      {"relationExists", {Op::RelationExists, {}, 1, true}},
      {"actionExists", {Op::ActionExists, {}, 1, true}},
      {"interactionExists", {Op::InteractionExists, {}, 3, false}},
      {"objects", {Op::ObjectsQuery, {}, 2, false}},
      {"actions", {Op::ActionsQuery, {}, 0, false}},
      {"first", {Op::First, {}, 1, false}},
      {"last", {Op::Last, {}, 1, false}},
      {"longest", {Op::Longest, {}, 1, false}},
      {"shortest", {Op::Shortest, {}, 1, false}},
      {"and", {Op::And, {}, 2, false}},
      {"xor", {Op::Xor, {}, 2, false}},
      {"equals", {Op::EqualsObject, {}, 2, false}},
      {"longerThan", {Op::LongerThan, {}, 2, true}},
      {"shorterThan", {Op::ShorterThan, {}, 2, true}},
      {"occursBefore", {Op::OccursBefore, {}, 2, false}},
      {"occursAfter", {Op::OccursAfter, {}, 2, false}},
      {"chooseObject", {Op::ChooseObject, {}, 2, false}},
      {"chooseTime", {Op::ChooseTime, {}, 2, false}},
      {"longerChoose", {Op::LongerChoose, {}, 2, false}},
      {"shorterChoose", {Op::ShorterChoose, {}, 2, false}},
      {"before", {Op::Localized, Localizer::Before, 2, false}},
      {"after", {Op::Localized, Localizer::After, 2, false}},
      {"while", {Op::Localized, Localizer::While, 2, false}},
      {"between", {Op::Localized, Localizer::Between, 3, false}},
  };
  return table;
}

using Arg = std::variant<std::string, ProgramPtr>;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ProgramPtr parse() {
    skip_ws();
    if (at_end()) throw ParseError(ParseError::Kind::Syntax, pos_, "empty program");
    const std::size_t start = pos_;
    Arg a = parse_arg();
    if (!std::holds_alternative<ProgramPtr>(a))
      throw ParseError(ParseError::Kind::Syntax, start, "expected a function call");
    skip_ws();
    if (!at_end()) throw ParseError(ParseError::Kind::Syntax, pos_, "trailing input");
    return std::get<ProgramPtr>(std::move(a));
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  // Reads text up to the next structural character.
  std::string_view read_word() {
    const std::size_t start = pos_;
    while (!at_end() && peek() != '(' && peek() != ')' && peek() != ',') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Arg parse_arg() {
    skip_ws();
    const std::size_t start = pos_;
    const std::string word = canonical_label(read_word());
    if (!at_end() && peek() == '(') {
      if (word.empty())
        throw ParseError(ParseError::Kind::Syntax, start, "missing function name");
      return parse_call(std::string(trim(read_back(start))), start);
    }
    if (word.empty()) throw ParseError(ParseError::Kind::Syntax, start, "empty argument");
    return word;
  }

  // Function names are case sensitive, so re-read the raw span.
  std::string_view read_back(std::size_t start) const {
    return text_.substr(start, pos_ - start);
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  ProgramPtr parse_call(const std::string& name, std::size_t start) {
    const auto& table = function_table();
    const auto it = table.find(name);
    if (it == table.end())
      throw ParseError(ParseError::Kind::UnknownFunction, start, "unknown function '" + name + "'");
    const FunctionSpec& spec = it->second;

    ++pos_;  // '('
    std::vector<Arg> args;
    skip_ws();
    if (!at_end() && peek() == ')') {
      ++pos_;
    } else {
      while (true) {
        args.push_back(parse_arg());
        skip_ws();
        if (at_end())
          throw ParseError(ParseError::Kind::Syntax, pos_, "unterminated call to '" + name + "'");
        const char c = peek();
        ++pos_;
        if (c == ')') break;
        if (c != ',')
          throw ParseError(ParseError::Kind::Syntax, pos_ - 1, "expected ',' or ')'");
      }
    }

    if (args.size() != spec.arity)
      throw ParseError(ParseError::Kind::Arity, start,
                       "'" + name + "' expects " + std::to_string(spec.arity) +
                           " argument(s), got " + std::to_string(args.size()));

    std::vector<std::string> labels;
    std::vector<ProgramPtr> children;
    for (auto& a : args) {
      if (spec.takes_labels) {
        if (!std::holds_alternative<std::string>(a))
          throw ParseError(ParseError::Kind::Variant, start, "'" + name + "' expects label atoms");
        labels.push_back(std::get<std::string>(std::move(a)));
      } else {
        if (!std::holds_alternative<ProgramPtr>(a))
          throw ParseError(ParseError::Kind::Variant, start,
                           "'" + name + "' expects program arguments");
        children.push_back(std::get<ProgramPtr>(std::move(a)));
      }
    }
    try {
      return make_node(spec.op, std::move(labels), std::move(children), spec.loc);
    } catch (const ProgramError& e) {
      throw ParseError(ParseError::Kind::Variant, start, e.what());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void render_into(const Program& p, std::string& out) {
  out += function_name(p);
  out += '(';
  bool first_arg = true;
  auto sep = [&] {
    if (!first_arg) out += ", ";
    first_arg = false;
  };
  for (const auto& l : p.labels()) {
    sep();
    out += l;
  }
  for (const auto& a : p.args()) {
    sep();
    render_into(*a, out);
  }
  out += ')';
}

}  // namespace

ProgramPtr parse_program(std::string_view text) { return Parser(text).parse(); }

ProgramPtr parse_program(std::string_view text, const Vocabulary& vocab) {
  auto p = parse_program(text);
  try {
    validate_labels(*p, vocab);
  } catch (const ProgramError& e) {
    throw ParseError(ParseError::Kind::UnknownLabel, 0, e.what());
  }
  return p;
}

std::string render_program(const Program& p) {
  std::string out;
  render_into(p, out);
  return out;
}

std::string canonical_key(const Program& p) { return render_program(p); }

}  // namespace qdag
