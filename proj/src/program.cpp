#include "qdag/program.hpp"

#include <algorithm>
#include <cctype>

namespace qdag {

namespace {

void require(bool cond, std::string_view what, const char* msg) {
  if (!cond) throw ProgramError(std::string(what) + ": " + msg);
}

bool is_one_of(const ProgramPtr& p, std::initializer_list<Op> ops) {
  return p && std::find(ops.begin(), ops.end(), p->op()) != ops.end();
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::ObjExists: return "objExists";
    case Op::RelationExists: return "relationExists";
    case Op::ActionExists: return "actionExists";
    case Op::InteractionExists: return "interactionExists";
    case Op::ObjectsQuery: return "objects";
    case Op::ActionsQuery: return "actions";
    case Op::First: return "first";
    case Op::Last: return "last";
    case Op::Longest: return "longest";
    case Op::Shortest: return "shortest";
    case Op::And: return "and";
    case Op::Xor: return "xor";
    case Op::EqualsObject: return "equals";
    case Op::LongerThan: return "longerThan";
    case Op::ShorterThan: return "shorterThan";
    case Op::OccursBefore: return "occursBefore";
    case Op::OccursAfter: return "occursAfter";
    case Op::ChooseObject: return "chooseObject";
    case Op::ChooseTime: return "chooseTime";
    case Op::LongerChoose: return "longerChoose";
    case Op::ShorterChoose: return "shorterChoose";
    case Op::Localized: return "localized";
  }
  return "?";
}

bool is_object_open_query(const ProgramPtr& p) {
  return p && p->unwrap_localized().op() == Op::ObjectsQuery;
}

bool is_action_open_query(const ProgramPtr& p) {
  return p && p->unwrap_localized().op() == Op::ActionsQuery;
}

void validate_node(Op op, const std::vector<std::string>& labels,
                   const std::vector<ProgramPtr>& args, std::optional<Localizer> loc) {
  const auto name = op_name(op);
  for (const auto& a : args) require(a != nullptr, name, "null argument");
  for (const auto& l : labels) {
    require(!l.empty(), name, "empty label");
    require(l.find_first_of("(),") == std::string::npos, name,
            "labels may not contain parentheses or commas");
  }
  require(op == Op::Localized || !loc.has_value(), name, "localizer on non-localized node");

  auto arity = [&](std::size_t n_labels, std::size_t n_args) {
    require(labels.size() == n_labels && args.size() == n_args, name, "arity mismatch");
  };

  switch (op) {
    case Op::ObjExists:
    case Op::RelationExists:
    case Op::ActionExists:
      arity(1, 0);
      break;
    case Op::LongerThan:
    case Op::ShorterThan:
      arity(2, 0);
      break;
    case Op::InteractionExists:
      arity(0, 3);
      require(args[0]->op() == Op::ObjExists && args[1]->op() == Op::RelationExists &&
                  args[2]->op() == Op::ObjExists,
              name, "expects (objExists, relationExists, objExists)");
      break;
    case Op::ObjectsQuery:
      arity(0, 2);
      require(args[0]->op() == Op::ObjExists && args[1]->op() == Op::RelationExists, name,
              "expects (objExists, relationExists)");
      break;
    case Op::ActionsQuery:
      arity(0, 0);
      break;
    case Op::First:
    case Op::Last:
      arity(0, 1);
      require(is_object_open_query(args[0]) || is_action_open_query(args[0]), name,
              "expects an objects/actions query");
      break;
    case Op::Longest:
    case Op::Shortest:
      arity(0, 1);
      require(is_action_open_query(args[0]), name, "expects an actions query");
      break;
    case Op::And:
    case Op::Xor:
      arity(0, 2);
      require(is_boolean(*args[0]) && is_boolean(*args[1]), name, "expects boolean operands");
      break;
    case Op::EqualsObject:
      arity(0, 2);
      require(args[0]->op() == Op::ObjExists, name, "candidate must be objExists");
      require(is_one_of(args[1], {Op::First, Op::Last}) && is_object_open_query(args[1]->args()[0]),
              name, "query must be first/last over an objects query");
      break;
    case Op::OccursBefore:
    case Op::OccursAfter:
      arity(0, 2);
      require(is_one_of(args[0], {Op::ActionExists, Op::InteractionExists}) &&
                  is_one_of(args[1], {Op::ActionExists, Op::InteractionExists}),
              name, "events must be actionExists or interactionExists");
      break;
    case Op::ChooseObject:
      arity(0, 2);
      require(args[0]->op() == Op::EqualsObject && args[1]->op() == Op::EqualsObject, name,
              "options must be equals");
      break;
    case Op::ChooseTime:
      arity(0, 2);
      require(args[0]->op() == Op::OccursBefore && args[1]->op() == Op::OccursAfter, name,
              "expects (occursBefore, occursAfter)");
      break;
    case Op::LongerChoose:
      arity(0, 2);
      require(args[0]->op() == Op::LongerThan && args[1]->op() == Op::LongerThan, name,
              "options must be longerThan");
      break;
    case Op::ShorterChoose:
      arity(0, 2);
      require(args[0]->op() == Op::ShorterThan && args[1]->op() == Op::ShorterThan, name,
              "options must be shorterThan");
      break;
    case Op::Localized: {
      require(loc.has_value(), name, "missing localizer");
      require(labels.empty(), name, "arity mismatch");
      const std::size_t want = *loc == Localizer::Between ? 3 : 2;
      require(args.size() == want, localizer_name(*loc), "arity mismatch");
      require(is_one_of(args[0], {Op::ObjExists, Op::RelationExists, Op::ActionExists,
                                  Op::InteractionExists, Op::ObjectsQuery, Op::ActionsQuery}),
              localizer_name(*loc), "body must be an exists, interaction or open query");
      for (std::size_t i = 1; i < args.size(); ++i)
        require(args[i]->op() == Op::ActionExists, localizer_name(*loc),
                "condition must be actionExists");
      break;
    }
  }
}

}  // namespace

const std::string& Program::label() const {
  if (labels_.empty()) throw ProgramError(std::string(op_name(op_)) + " has no label");
  return labels_.front();
}

const Program& Program::unwrap_localized() const {
  return op_ == Op::Localized ? *args_.front() : *this;
}

bool operator==(const Program& a, const Program& b) {
  if (&a == &b) return true;
  if (a.op_ != b.op_ || a.localizer_ != b.localizer_ || a.labels_ != b.labels_ ||
      a.args_.size() != b.args_.size())
    return false;
  for (std::size_t i = 0; i < a.args_.size(); ++i)
    if (!(*a.args_[i] == *b.args_[i])) return false;
  return true;
}

ProgramPtr make_node(Op op, std::vector<std::string> labels, std::vector<ProgramPtr> args,
                     std::optional<Localizer> loc) {
  for (auto& l : labels) l = canonical_label(l);
  validate_node(op, labels, args, loc);
  return ProgramPtr(new Program(op, std::move(labels), std::move(args), loc));
}

ProgramPtr obj_exists(std::string object) { return make_node(Op::ObjExists, {std::move(object)}, {}); }
ProgramPtr relation_exists(std::string relation) {
  return make_node(Op::RelationExists, {std::move(relation)}, {});
}
ProgramPtr action_exists(std::string action) {
  return make_node(Op::ActionExists, {std::move(action)}, {});
}
ProgramPtr interaction_exists(ProgramPtr subject, ProgramPtr relation, ProgramPtr object) {
  return make_node(Op::InteractionExists, {},
                   {std::move(subject), std::move(relation), std::move(object)});
}
ProgramPtr objects_query(ProgramPtr subject, ProgramPtr relation) {
  return make_node(Op::ObjectsQuery, {}, {std::move(subject), std::move(relation)});
}
ProgramPtr actions_query() { return make_node(Op::ActionsQuery, {}, {}); }
ProgramPtr first(ProgramPtr body) { return make_node(Op::First, {}, {std::move(body)}); }
ProgramPtr last(ProgramPtr body) { return make_node(Op::Last, {}, {std::move(body)}); }
ProgramPtr longest(ProgramPtr body) { return make_node(Op::Longest, {}, {std::move(body)}); }
ProgramPtr shortest(ProgramPtr body) { return make_node(Op::Shortest, {}, {std::move(body)}); }
ProgramPtr conj_and(ProgramPtr left, ProgramPtr right) {
  return make_node(Op::And, {}, {std::move(left), std::move(right)});
}
ProgramPtr conj_xor(ProgramPtr left, ProgramPtr right) {
  return make_node(Op::Xor, {}, {std::move(left), std::move(right)});
}
ProgramPtr equals_object(ProgramPtr candidate, ProgramPtr query) {
  return make_node(Op::EqualsObject, {}, {std::move(candidate), std::move(query)});
}
ProgramPtr longer_than(std::string a1, std::string a2) {
  return make_node(Op::LongerThan, {std::move(a1), std::move(a2)}, {});
}
ProgramPtr shorter_than(std::string a1, std::string a2) {
  return make_node(Op::ShorterThan, {std::move(a1), std::move(a2)}, {});
}
ProgramPtr occurs_before(ProgramPtr e1, ProgramPtr e2) {
  return make_node(Op::OccursBefore, {}, {std::move(e1), std::move(e2)});
}
ProgramPtr occurs_after(ProgramPtr e1, ProgramPtr e2) {
  return make_node(Op::OccursAfter, {}, {std::move(e1), std::move(e2)});
}
ProgramPtr choose_object(ProgramPtr opt_a, ProgramPtr opt_b) {
  return make_node(Op::ChooseObject, {}, {std::move(opt_a), std::move(opt_b)});
}
ProgramPtr choose_time(ProgramPtr before, ProgramPtr after) {
  return make_node(Op::ChooseTime, {}, {std::move(before), std::move(after)});
}
ProgramPtr longer_choose(ProgramPtr a, ProgramPtr b) {
  return make_node(Op::LongerChoose, {}, {std::move(a), std::move(b)});
}
ProgramPtr shorter_choose(ProgramPtr a, ProgramPtr b) {
  return make_node(Op::ShorterChoose, {}, {std::move(a), std::move(b)});
}
ProgramPtr localized(ProgramPtr body, Localizer loc, ProgramPtr cond1, ProgramPtr cond2) {
  std::vector<ProgramPtr> args{std::move(body), std::move(cond1)};
  if (cond2) args.push_back(std::move(cond2));
  return make_node(Op::Localized, {}, std::move(args), loc);
}

std::string_view localizer_name(Localizer loc) {
  switch (loc) {
    case Localizer::Before: return "before";
    case Localizer::After: return "after";
    case Localizer::While: return "while";
    case Localizer::Between: return "between";
  }
  return "?";
}

std::optional<Localizer> parse_localizer(std::string_view name) {
  if (name == "before") return Localizer::Before;
  if (name == "after") return Localizer::After;
  if (name == "while") return Localizer::While;
  if (name == "between") return Localizer::Between;
  return std::nullopt;
}

std::string_view function_name(const Program& p) {
  if (p.op() == Op::Localized) return localizer_name(*p.localizer());
  return op_name(p.op());
}

AnswerKind answer_kind(const Program& p) {
  switch (p.op()) {
    case Op::ObjectsQuery:
    case Op::ActionsQuery:
    case Op::First:
    case Op::Last:
    case Op::Longest:
    case Op::Shortest:
    case Op::ChooseObject:
    case Op::LongerChoose:
    case Op::ShorterChoose:
      return AnswerKind::Label;
    case Op::ChooseTime:
      return AnswerKind::Temporal;
    case Op::Localized:
      return answer_kind(p.arg(0));
    default:
      return AnswerKind::Bool;
  }
}

bool is_boolean(const Program& p) { return answer_kind(p) == AnswerKind::Bool; }

bool is_open_query(const Program& p) {
  const Op op = p.unwrap_localized().op();
  return op == Op::ObjectsQuery || op == Op::ActionsQuery;
}

std::size_t tree_size(const Program& p) {
  std::size_t n = 1;
  for (const auto& a : p.args()) n += tree_size(*a);
  return n;
}

std::size_t tree_depth(const Program& p) {
  std::size_t d = 0;
  for (const auto& a : p.args()) d = std::max(d, tree_depth(*a));
  return d + 1;
}

std::string canonical_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace qdag
