#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdag/consistency.hpp"
#include "qdag/decomposer.hpp"
#include "qdag/records.hpp"
#include "qdag/scene_graph.hpp"
#include "qdag/vocabulary.hpp"

namespace qdag {

struct AnswerEntry {
  Answer answer;
  Provenance provenance;
  friend bool operator==(const AnswerEntry&, const AnswerEntry&) = default;
};

/// Node id -> answer. Nodes absent from the map are unknown.
using AnswerMap = std::map<std::string, AnswerEntry>;

AnswerLookup lookup_in(const AnswerMap& answers);

class PropagationContradiction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pushes answers down the DAG to a fixed point.
///
/// Downward rules: interaction, temporal and and-yes make every child yes;
/// xor-yes makes left yes and right no; equals-yes makes the exists child yes
/// and sets the query child to the candidate; a choose answer marks the
/// chosen option yes and the other no. A "no" only propagates where the
/// contrapositive forces a single child: and-no with one child yes, xor-no
/// with left yes (right is yes) or right no (left is no). Seeds are never
/// overwritten; a conflicting derivation throws PropagationContradiction.
AnswerMap propagate_answers(const QuestionDag& dag, const AnswerMap& seeds);

/// Object-exists questions answered "no" for each absent object, plus a
/// localized object-exists question anchored on an action absent from `g`
/// (also "no"). Question ids are left empty.
std::vector<QuestionRecord> apply_negative_annotations(const NegativeAnnotation& ann,
                                                       const SceneGraph& g,
                                                       const Vocabulary& vocab,
                                                       const TemplateTable& templates = default_templates());

/// Every applicable consistency check the given answers fail.
std::vector<CheckInstance> audit_gold(const QuestionDag& dag, const AnswerMap& answers,
                                      const BanList& bans = BanList(std::set<QuestionType>{}));

}  // namespace qdag
