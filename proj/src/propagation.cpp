#include "qdag/propagation.hpp"

#include "qdag/question_type.hpp"
#include "qdag/templates.hpp"

namespace qdag {

AnswerLookup lookup_in(const AnswerMap& answers) {
  return [&answers](const std::string& id) -> std::optional<Answer> {
    const auto it = answers.find(id);
    if (it == answers.end()) return std::nullopt;
    return it->second.answer;
  };
}

namespace {

class Propagator {
 public:
  Propagator(const QuestionDag& dag, AnswerMap seeds) : dag_(dag), out_(std::move(seeds)) {}

  AnswerMap run() {
    do {
      changed_ = false;
      for (const auto& n : dag_.nodes) step(n);
    } while (changed_);
    return std::move(out_);
  }

 private:
  const Answer* get(const std::string& id) const {
    const auto it = out_.find(id);
    return it == out_.end() ? nullptr : &it->second.answer;
  }

  void set(const std::string& id, const Answer& a, const std::string& from) {
    if (const auto* cur = get(id)) {
      if (*cur != a)
        throw PropagationContradiction("node " + id + " in DAG " + dag_.video_id + "/" +
                                       dag_.root().key + ": derived '" + a.to_string() +
                                       "' from " + from + " but already '" + cur->to_string() + "'");
      return;
    }
    out_.emplace(id, AnswerEntry{a, Provenance::Propagated});
    changed_ = true;
  }

  void step(const DagNode& n) {
    const Answer* a = get(n.id);
    if (!a || n.args.empty()) return;
    const Program& p = *n.program;
    const auto& kids = n.args;
    auto all = [&](const Answer& v) {
      for (const auto& k : kids) set(k, v, n.id);
    };

    switch (p.op()) {
      case Op::InteractionExists:
      case Op::OccursBefore:
      case Op::OccursAfter:
        if (a->is_yes()) all(Answer::yes());
        break;
      case Op::Localized:
        if (is_boolean(p.arg(0)) && a->is_yes()) all(Answer::yes());
        break;
      case Op::And:
        if (a->is_yes()) {
          all(Answer::yes());
        } else if (a->is_no()) {
          const Answer* l = get(kids[0]);
          const Answer* r = get(kids[1]);
          if (l && l->is_yes()) set(kids[1], Answer::no(), n.id);
          if (r && r->is_yes()) set(kids[0], Answer::no(), n.id);
        }
        break;
      case Op::Xor:
        if (a->is_yes()) {
          set(kids[0], Answer::yes(), n.id);
          set(kids[1], Answer::no(), n.id);
        } else if (a->is_no()) {
          const Answer* l = get(kids[0]);
          const Answer* r = get(kids[1]);
          if (l && l->is_yes()) set(kids[1], Answer::yes(), n.id);
          if (r && r->is_no()) set(kids[0], Answer::no(), n.id);
        }
        break;
      case Op::EqualsObject:
        if (a->is_yes()) {
          set(kids[0], Answer::yes(), n.id);
          set(kids[1], Answer::label(p.arg(0).label()), n.id);
        }
        break;
      case Op::ChooseObject:
        if (a->is_label()) pick(n, a->as_label() == p.arg(0).arg(0).label(),
                                a->as_label() == p.arg(1).arg(0).label());
        break;
      case Op::ChooseTime:
        if (a->is_temporal())
          pick(n, a->as_temporal() == TemporalToken::Before, a->as_temporal() == TemporalToken::After);
        break;
      case Op::LongerChoose:
      case Op::ShorterChoose:
        if (a->is_label())
          pick(n, a->as_label() == p.arg(0).labels()[0], a->as_label() == p.arg(1).labels()[0]);
        break;
      default:
        break;
    }
  }

  // Chosen option yes, the other no; an answer naming neither (or both)
  // options entails nothing.
  void pick(const DagNode& n, bool first, bool second) {
    if (first == second) return;
    set(n.args[first ? 0 : 1], Answer::yes(), n.id);
    set(n.args[first ? 1 : 0], Answer::no(), n.id);
  }

  const QuestionDag& dag_;
  AnswerMap out_;
  bool changed_ = false;
};

}  // namespace

AnswerMap propagate_answers(const QuestionDag& dag, const AnswerMap& seeds) {
  return Propagator(dag, seeds).run();
}

std::vector<QuestionRecord> apply_negative_annotations(const NegativeAnnotation& ann,
                                                       const SceneGraph& g, const Vocabulary& vocab,
                                                       const TemplateTable& templates) {
  if (ann.video_id != g.video_id)
    throw std::invalid_argument("negative annotation for " + ann.video_id + " applied to " +
                                g.video_id);
  std::vector<std::string> invalid_actions;
  for (const auto& a : vocab.actions)
    if (!g.find_action(a)) invalid_actions.push_back(a);
  std::vector<std::string> present;
  for (const auto& o : g.present_objects())
    if (o != "person") present.push_back(o);

  std::vector<QuestionRecord> out;
  auto emit = [&](ProgramPtr p, Provenance prov) {
    const auto r = render_question(*p, templates);
    const auto qtype = classify(*p);
    out.push_back({"", g.video_id, std::move(p), r.question, qtype, Answer::no(), prov});
  };
  for (std::size_t i = 0; i < ann.absent_objects.size(); ++i) {
    const auto& o = ann.absent_objects[i];
    emit(obj_exists(o), Provenance::Annotated);
    if (invalid_actions.empty()) continue;
    const auto& body = present.empty() ? o : present[i % present.size()];
    emit(localized(obj_exists(body), Localizer::Before,
                   action_exists(invalid_actions[i % invalid_actions.size()])),
         Provenance::Annotated);
  }
  return out;
}

std::vector<CheckInstance> audit_gold(const QuestionDag& dag, const AnswerMap& answers,
                                      const BanList& bans) {
  std::vector<CheckInstance> out;
  for (auto& c : evaluate_all(dag, lookup_in(answers), bans))
    if (c.verdict == Verdict::Fail) out.push_back(std::move(c));
  return out;
}

}  // namespace qdag
