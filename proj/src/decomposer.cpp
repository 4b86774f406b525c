#include "qdag/decomposer.hpp"

#include <functional>
#include <set>
#include <stdexcept>

#include "qdag/parser.hpp"

namespace qdag {

namespace {

constexpr std::array<std::string_view, 13> kRuleNames{
    "interaction", "first", "last",  "equals", "and",    "xor",     "choose",
    "longerChoose", "shorterChoose", "after",  "before", "while", "between",
};

}  // namespace

std::string_view to_string(CompositionRule r) { return kRuleNames[static_cast<std::size_t>(r)]; }

std::optional<CompositionRule> parse_composition_rule(std::string_view name) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i)
    if (kRuleNames[i] == name) return static_cast<CompositionRule>(i);
  return std::nullopt;
}

std::optional<CompositionRule> composition_rule(const Program& p) {
  switch (p.op()) {
    case Op::ObjExists:
    case Op::RelationExists:
    case Op::ActionExists:
    case Op::ActionsQuery:
    case Op::LongerThan:
    case Op::ShorterThan:
      return std::nullopt;
    case Op::InteractionExists:
    case Op::ObjectsQuery:
      return CompositionRule::Interaction;
    case Op::First:
    case Op::Longest:
      return CompositionRule::First;
    case Op::Last:
    case Op::Shortest:
      return CompositionRule::Last;
    case Op::And:
      return CompositionRule::And;
    case Op::Xor:
      return CompositionRule::Xor;
    case Op::EqualsObject:
      return CompositionRule::Equals;
    case Op::OccursBefore:
      return CompositionRule::Before;
    case Op::OccursAfter:
      return CompositionRule::After;
    case Op::ChooseObject:
    case Op::ChooseTime:
      return CompositionRule::Choose;
    case Op::LongerChoose:
      return CompositionRule::LongerChoose;
    case Op::ShorterChoose:
      return CompositionRule::ShorterChoose;
    case Op::Localized:
      switch (*p.localizer()) {
        case Localizer::Before:
          return CompositionRule::Before;
        case Localizer::After:
          return CompositionRule::After;
        case Localizer::While:
          return CompositionRule::While;
        case Localizer::Between:
          return CompositionRule::Between;
      }
  }
  return std::nullopt;
}

const DagNode* QuestionDag::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes[it->second];
}

const DagNode* QuestionDag::find_by_key(const std::string& key) const {
  const auto it = key_index_.find(key);
  return it == key_index_.end() ? nullptr : &nodes[it->second];
}

const DagNode& QuestionDag::node(const std::string& id) const {
  const auto* n = find(id);
  if (!n) throw std::out_of_range("no DAG node '" + id + "'");
  return *n;
}

DagNode& QuestionDag::node(const std::string& id) {
  return const_cast<DagNode&>(std::as_const(*this).node(id));
}

std::vector<const DagEdge*> QuestionDag::out_edges(const std::string& id) const {
  std::vector<const DagEdge*> out;
  for (const auto& e : edges)
    if (e.parent == id) out.push_back(&e);
  return out;
}

std::vector<const DagEdge*> QuestionDag::in_edges(const std::string& id) const {
  std::vector<const DagEdge*> out;
  for (const auto& e : edges)
    if (e.child == id) out.push_back(&e);
  return out;
}

void QuestionDag::reindex() {
  index_.clear();
  key_index_.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    index_.emplace(nodes[i].id, i);
    key_index_.emplace(nodes[i].key, i);
  }
}

void QuestionDag::validate() const {
  auto fail = [](const std::string& m) { throw std::logic_error("invalid DAG: " + m); };
  if (nodes.empty()) fail("no nodes");
  std::set<std::string> ids, keys;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) fail("duplicate id " + n.id);
    if (!keys.insert(n.key).second) fail("duplicate program " + n.key);
  }
  std::map<std::string, int> indeg;
  std::set<std::tuple<std::string, std::string, CompositionRule>> seen;
  for (const auto& e : edges) {
    if (!ids.contains(e.parent) || !ids.contains(e.child)) fail("edge to unknown node");
    if (!seen.emplace(e.parent, e.child, e.rule).second) fail("duplicate edge");
    ++indeg[e.child];
  }
  int roots = 0;
  for (const auto& n : nodes)
    if (!indeg.contains(n.id)) ++roots;
  if (roots != 1 || indeg.contains(nodes.front().id)) fail("expected exactly one root");

  // Kahn's algorithm.
  std::vector<std::string> ready{nodes.front().id};
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& e : edges)
      if (e.parent == id && --indeg[e.child] == 0) ready.push_back(e.child);
  }
  if (visited != nodes.size()) fail("cycle detected");
}

nlohmann::json QuestionDag::to_json() const {
  nlohmann::json ns = nlohmann::json::array();
  for (const auto& n : nodes)
    ns.push_back({{"id", n.id},
                  {"question_id", n.question_id},
                  {"program", n.key},
                  {"question", n.question},
                  {"qtype", to_string(n.qtype)}});
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : edges)
    es.push_back({{"parent", e.parent}, {"child", e.child}, {"rule", to_string(e.rule)}});
  return {{"root_id", root_id()}, {"video_id", video_id}, {"nodes", std::move(ns)},
          {"edges", std::move(es)}};
}

QuestionDag QuestionDag::from_json(const nlohmann::json& j) {
  QuestionDag d;
  d.video_id = j.at("video_id").get<std::string>();
  const auto root = j.at("root_id").get<std::string>();
  for (const auto& n : j.at("nodes")) {
    DagNode node;
    node.id = n.at("id").get<std::string>();
    node.question_id = n.value("question_id", std::string());
    node.program = parse_program(n.at("program").get<std::string>());
    node.key = canonical_key(*node.program);
    node.question = n.value("question", std::string());
    const auto qt = n.at("qtype").get<std::string>();
    const auto parsed = parse_question_type(qt);
    if (!parsed) throw std::invalid_argument("unknown qtype '" + qt + "'");
    node.qtype = *parsed;
    d.nodes.push_back(std::move(node));
  }
  if (d.nodes.empty() || d.nodes.front().id != root)
    throw std::invalid_argument("root node must be listed first");
  for (const auto& e : j.at("edges")) {
    const auto rule_name = e.at("rule").get<std::string>();
    const auto rule = parse_composition_rule(rule_name);
    if (!rule) throw std::invalid_argument("unknown composition rule '" + rule_name + "'");
    d.edges.push_back({e.at("parent").get<std::string>(), e.at("child").get<std::string>(), *rule});
  }
  d.reindex();
  for (auto& n : d.nodes) {
    if (composition_rule(*n.program) == std::nullopt) continue;
    for (const auto& a : n.program->args()) {
      const auto* c = d.find_by_key(canonical_key(*a));
      if (!c) throw std::invalid_argument("DAG is missing sub-program " + canonical_key(*a));
      n.args.push_back(c->id);
    }
  }
  d.validate();
  return d;
}

QuestionDag decompose(const ProgramPtr& p, const std::string& video_id,
                      const TemplateTable& templates) {
  QuestionDag dag;
  dag.video_id = video_id;
  std::map<std::string, std::string> id_of_key;
  std::set<std::tuple<std::string, std::string, CompositionRule>> edge_seen;

  // Preorder: a node gets its id before its arguments are visited.
  std::function<std::string(const ProgramPtr&)> visit = [&](const ProgramPtr& sub) {
    auto key = canonical_key(*sub);
    if (const auto it = id_of_key.find(key); it != id_of_key.end()) return it->second;
    const std::string id = dag.nodes.empty() ? "q" : "s" + std::to_string(dag.nodes.size());
    id_of_key.emplace(key, id);
    const auto rendered = render_question(*sub, templates);
    const std::size_t slot = dag.nodes.size();
    dag.nodes.push_back({id, sub, std::move(key), rendered.question, rendered.indirect,
                         classify(*sub), {}, {}});

    if (const auto rule = composition_rule(*sub)) {
      std::vector<std::string> args;
      for (const auto& a : sub->args()) {
        const auto child = visit(a);
        args.push_back(child);
        if (edge_seen.emplace(id, child, *rule).second) dag.edges.push_back({id, child, *rule});
      }
      dag.nodes[slot].args = std::move(args);
    }
    return id;
  };
  visit(p);
  dag.reindex();
  return dag;
}

}  // namespace qdag
