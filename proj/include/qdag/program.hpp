#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdag {

/// Reasoning functions available to question programs.
enum class Op : std::uint8_t {
  ObjExists,
  RelationExists,
  ActionExists,
  InteractionExists,
  ObjectsQuery,
  ActionsQuery,
  First,
  Last,
  Longest,
  Shortest,
  And,
  Xor,
  EqualsObject,
  LongerThan,
  ShorterThan,
  OccursBefore,
  OccursAfter,
  ChooseObject,
  ChooseTime,
  LongerChoose,
  ShorterChoose,
  Localized,
};

enum class Localizer : std::uint8_t { Before, After, While, Between };

/// Shape of the value a program evaluates to.
enum class AnswerKind : std::uint8_t { Bool, Label, Temporal };

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Program;
using ProgramPtr = std::shared_ptr<const Program>;

/// Immutable question-program AST node.
///
/// Leaves (ObjExists, RelationExists, ActionExists, LongerThan, ShorterThan)
/// carry labels; every other variant carries program arguments. Localized
/// nodes carry [body, cond1] or [body, cond1, cond2] for `between`.
/// Construction goes through the factory functions below, which enforce the
/// per-variant argument constraints.
class Program {
 public:
  Op op() const { return op_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<ProgramPtr>& args() const { return args_; }
  std::optional<Localizer> localizer() const { return localizer_; }

  /// First label of a leaf; throws for non-leaves.
  const std::string& label() const;
  const Program& arg(std::size_t i) const { return *args_.at(i); }
  bool is_leaf() const { return args_.empty(); }

  /// Localized body, or the node itself for anything else.
  const Program& unwrap_localized() const;

  friend bool operator==(const Program& a, const Program& b);

  // Factories; each validates argument variants and throws ProgramError.
  friend ProgramPtr make_node(Op op, std::vector<std::string> labels,
                              std::vector<ProgramPtr> args,
                              std::optional<Localizer> loc);

 private:
  Program(Op op, std::vector<std::string> labels, std::vector<ProgramPtr> args,
          std::optional<Localizer> loc)
      : op_(op), labels_(std::move(labels)), args_(std::move(args)), localizer_(loc) {}

  Op op_;
  std::vector<std::string> labels_;
  std::vector<ProgramPtr> args_;
  std::optional<Localizer> localizer_;
};

ProgramPtr make_node(Op op, std::vector<std::string> labels, std::vector<ProgramPtr> args,
                     std::optional<Localizer> loc = std::nullopt);

ProgramPtr obj_exists(std::string object);
ProgramPtr relation_exists(std::string relation);
ProgramPtr action_exists(std::string action);
ProgramPtr interaction_exists(ProgramPtr subject, ProgramPtr relation, ProgramPtr object);
ProgramPtr objects_query(ProgramPtr subject, ProgramPtr relation);
ProgramPtr actions_query();
ProgramPtr first(ProgramPtr body);
ProgramPtr last(ProgramPtr body);
ProgramPtr longest(ProgramPtr body);
ProgramPtr shortest(ProgramPtr body);
ProgramPtr conj_and(ProgramPtr left, ProgramPtr right);
ProgramPtr conj_xor(ProgramPtr left, ProgramPtr right);
ProgramPtr equals_object(ProgramPtr candidate, ProgramPtr query);
ProgramPtr longer_than(std::string a1, std::string a2);
ProgramPtr shorter_than(std::string a1, std::string a2);
ProgramPtr occurs_before(ProgramPtr e1, ProgramPtr e2);
ProgramPtr occurs_after(ProgramPtr e1, ProgramPtr e2);
ProgramPtr choose_object(ProgramPtr opt_a, ProgramPtr opt_b);
ProgramPtr choose_time(ProgramPtr before, ProgramPtr after);
ProgramPtr longer_choose(ProgramPtr a, ProgramPtr b);
ProgramPtr shorter_choose(ProgramPtr a, ProgramPtr b);
ProgramPtr localized(ProgramPtr body, Localizer loc, ProgramPtr cond1,
                     ProgramPtr cond2 = nullptr);

/// Grammar function name ("objExists", "after", ...).
std::string_view function_name(const Program& p);
std::string_view localizer_name(Localizer loc);
std::optional<Localizer> parse_localizer(std::string_view name);

AnswerKind answer_kind(const Program& p);
bool is_boolean(const Program& p);
/// Set-valued queries (objects / actions), possibly localized.
bool is_open_query(const Program& p);

/// Number of nodes in the tree (shared subtrees counted per occurrence).
std::size_t tree_size(const Program& p);
std::size_t tree_depth(const Program& p);

/// Lowercases, trims and collapses internal whitespace.
std::string canonical_label(std::string_view text);

}  // namespace qdag
