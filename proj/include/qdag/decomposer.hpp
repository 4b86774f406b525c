#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdag/program.hpp"
#include "qdag/question_type.hpp"
#include "qdag/templates.hpp"

namespace qdag {

enum class CompositionRule : std::uint8_t {
  Interaction,
  First,
  Last,
  Equals,
  And,
  Xor,
  Choose,
  LongerChoose,
  ShorterChoose,
  After,
  Before,
  While,
  Between,
};

inline constexpr std::array<CompositionRule, 13> kAllCompositionRules{
    CompositionRule::Interaction, CompositionRule::First,        CompositionRule::Last,
    CompositionRule::Equals,      CompositionRule::And,          CompositionRule::Xor,
    CompositionRule::Choose,      CompositionRule::LongerChoose, CompositionRule::ShorterChoose,
    CompositionRule::After,       CompositionRule::Before,       CompositionRule::While,
    CompositionRule::Between,
};

std::string_view to_string(CompositionRule r);
std::optional<CompositionRule> parse_composition_rule(std::string_view name);

/// Rule labelling every edge out of a node with this root variant; nullopt
/// for leaves. Longest/Shortest reuse first/last, OccursBefore/After reuse
/// the before/after localizer rules.
std::optional<CompositionRule> composition_rule(const Program& p);

struct DagNode {
  std::string id;  // "q" for the root, then "s1", "s2", ... in preorder
  ProgramPtr program;
  std::string key;  // canonical_key(*program)
  std::string question;
  std::string indirect;
  QuestionType qtype;
  /// Child node id per program argument slot (duplicates allowed).
  std::vector<std::string> args;
  /// Corpus-wide question id; empty until assigned by the corpus builder.
  std::string question_id;
};

struct DagEdge {
  std::string parent;
  std::string child;
  CompositionRule rule;
  friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

class QuestionDag {
 public:
  std::string video_id;
  std::vector<DagNode> nodes;  // nodes[0] is the root
  std::vector<DagEdge> edges;

  const std::string& root_id() const { return nodes.front().id; }
  const DagNode& root() const { return nodes.front(); }
  const DagNode& node(const std::string& id) const;
  DagNode& node(const std::string& id);
  const DagNode* find(const std::string& id) const;
  const DagNode* find_by_key(const std::string& key) const;

  std::vector<const DagEdge*> out_edges(const std::string& id) const;
  std::vector<const DagEdge*> in_edges(const std::string& id) const;

  /// Structural check: unique ids and keys, edges between known nodes,
  /// single root, acyclic. Throws std::logic_error.
  void validate() const;

  nlohmann::json to_json() const;
  /// Re-parses node programs and rebuilds the argument-slot links.
  static QuestionDag from_json(const nlohmann::json& j);

  void reindex();

 private:
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::size_t> key_index_;
};

/// Recursively decomposes `p` into a DAG of sub-questions sharing
/// structurally equal sub-programs.
QuestionDag decompose(const ProgramPtr& p, const std::string& video_id,
                      const TemplateTable& templates = default_templates());

}  // namespace qdag
