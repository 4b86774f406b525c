#include "qdag/corpus.hpp"

#include <algorithm>
#include <set>

#include "qdag/executor.hpp"
#include "qdag/parallel.hpp"
#include "qdag/parser.hpp"

namespace qdag {

namespace {

constexpr Family kAllFamilies[] = {
    Family::ObjExists,       Family::RelationExists, Family::Interaction,
    Family::ActionExists,    Family::ExistsTemporalLoc, Family::InteractionTemporalLoc,
    Family::FirstLast,       Family::LongestShortest, Family::Conjunction,
    Family::Equals,          Family::Duration,       Family::OccursOrder,
    Family::ChooseObject,    Family::ChooseTime,     Family::ChooseDuration,
    Family::ObjectsQuery,    Family::ActionsQuery,
};

constexpr std::uint64_t kCorpusSalt = 0xC0A9F5E1D2B3A4ULL;

class Sampler {
 public:
  Sampler(Rng& rng, const SceneGraph& g, const Vocabulary& v) : rng_(rng), g_(g) {
    for (const auto& r : g.relationships) {
      if (r.object != "person") objects_.push_back(r.object);
      relations_.push_back(r.relation);
    }
    for (const auto& a : g.actions) actions_.push_back(a.label);
    dedup(objects_);
    dedup(relations_);
    all_objects_.assign(v.objects.begin(), v.objects.end());
    std::erase(all_objects_, std::string("person"));
    all_relations_.assign(v.relations.begin(), v.relations.end());
    all_actions_.assign(v.actions.begin(), v.actions.end());
  }

  ProgramPtr draw(Family f) {
    switch (f) {
      case Family::ObjExists:
        return obj_exists(object());
      case Family::RelationExists:
        return relation_exists(relation());
      case Family::Interaction:
        return interaction();
      case Family::ActionExists:
        return action_exists(action(0.75));
      case Family::ExistsTemporalLoc:
        return localize(rng_.bernoulli(0.5) ? obj_exists(object()) : relation_exists(relation()));
      case Family::InteractionTemporalLoc:
        return localize(interaction());
      case Family::FirstLast: {
        auto body = objects_query(obj_exists("person"), relation_exists(relation(0.9)));
        if (rng_.bernoulli(0.4)) body = localize(body);
        return rng_.bernoulli(0.5) ? first(body) : last(body);
      }
      case Family::LongestShortest: {
        auto body = actions_query();
        if (rng_.bernoulli(0.3)) body = localize(body);
        return rng_.bernoulli(0.5) ? longest(body) : shortest(body);
      }
      case Family::Conjunction: {
        auto l = event();
        auto r = event();
        return rng_.bernoulli(0.5) ? conj_and(l, r) : conj_xor(l, r);
      }
      case Family::Equals: {
        auto q = first_last_query();
        return equals_object(obj_exists(candidate_for(*q)), q);
      }
      case Family::Duration: {
        auto [a1, a2] = two_actions(0.85);
        return rng_.bernoulli(0.5) ? longer_than(a1, a2) : shorter_than(a1, a2);
      }
      case Family::OccursOrder: {
        auto e1 = event();
        auto e2 = event();
        return rng_.bernoulli(0.5) ? occurs_before(e1, e2) : occurs_after(e1, e2);
      }
      case Family::ChooseObject: {
        auto q = first_last_query();
        std::string truth;
        try {
          truth = execute(*q, g_).as_label();
        } catch (const UndefinedAnswer&) {
          truth = object();
        }
        std::string other = object();
        for (int i = 0; i < 8 && other == truth; ++i) other = pick(all_objects_);
        if (other == truth) return nullptr;
        auto a = equals_object(obj_exists(truth), q);
        auto b = equals_object(obj_exists(other), q);
        return rng_.bernoulli(0.5) ? choose_object(a, b) : choose_object(b, a);
      }
      case Family::ChooseTime: {
        auto e1 = event();
        auto e2 = event();
        return choose_time(occurs_before(e1, e2), occurs_after(e1, e2));
      }
      case Family::ChooseDuration: {
        auto [a1, a2] = two_actions(1.0);
        if (rng_.bernoulli(0.5))
          return longer_choose(longer_than(a1, a2), longer_than(a2, a1));
        return shorter_choose(shorter_than(a1, a2), shorter_than(a2, a1));
      }
      case Family::ObjectsQuery:
        return objects_query(obj_exists("person"), relation_exists(relation(0.9)));
      case Family::ActionsQuery:
        return localize(actions_query());
    }
    return nullptr;
  }

 private:
  static void dedup(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  const std::string& pick(const std::vector<std::string>& v) { return rng_.pick(v); }

  // Present in the video with probability p (when possible), else any vocabulary label.
  const std::string& biased(const std::vector<std::string>& present,
                            const std::vector<std::string>& all, double p) {
    if (!present.empty() && rng_.bernoulli(p)) return pick(present);
    return pick(all);
  }

  const std::string& object(double p = 0.7) { return biased(objects_, all_objects_, p); }
  const std::string& relation(double p = 0.7) { return biased(relations_, all_relations_, p); }
  const std::string& action(double p) { return biased(actions_, all_actions_, p); }

  std::pair<std::string, std::string> two_actions(double p) {
    std::string a1 = action(p);
    std::string a2 = action(p);
    for (int i = 0; i < 8 && a2 == a1; ++i) a2 = action(p);
    return {a1, a2};
  }

  ProgramPtr interaction() {
    if (!g_.relationships.empty() && rng_.bernoulli(0.6)) {
      const auto& r = g_.relationships[rng_.index(g_.relationships.size())];
      return interaction_exists(obj_exists(r.subject), relation_exists(r.relation),
                                obj_exists(r.object));
    }
    return interaction_exists(obj_exists("person"), relation_exists(relation()),
                              obj_exists(object()));
  }

  ProgramPtr event() {
    if (rng_.bernoulli(0.5)) return action_exists(action(0.8));
    return interaction();
  }

  ProgramPtr localize(ProgramPtr body) {
    const auto loc = static_cast<Localizer>(rng_.uniform_int(0, 3));
    if (loc == Localizer::Between) {
      auto [a1, a2] = two_actions(0.9);
      if (a1 == a2) return localized(body, Localizer::Before, action_exists(a1));
      return localized(body, loc, action_exists(a1), action_exists(a2));
    }
    return localized(body, loc, action_exists(action(0.9)));
  }

  ProgramPtr first_last_query() {
    auto body = objects_query(obj_exists("person"), relation_exists(relation(0.9)));
    if (rng_.bernoulli(0.3)) body = localize(body);
    return rng_.bernoulli(0.5) ? first(body) : last(body);
  }

  // The query's own answer half the time, so equals questions are mixed.
  std::string candidate_for(const Program& q) {
    if (rng_.bernoulli(0.5)) {
      try {
        return execute(q, g_).as_label();
      } catch (const UndefinedAnswer&) {
      }
    }
    return object();
  }

  Rng& rng_;
  const SceneGraph& g_;
  std::vector<std::string> objects_, relations_, actions_;
  std::vector<std::string> all_objects_, all_relations_, all_actions_;
};

}  // namespace

ProgramPtr sample_program(Family f, Rng& rng, const SceneGraph& g, const Vocabulary& vocab) {
  return Sampler(rng, g, vocab).draw(f);
}

const std::string* QuestionIndex::find(const std::string& key) const {
  const auto it = ids_.find(key);
  return it == ids_.end() ? nullptr : &it->second;
}

bool QuestionIndex::add(QuestionDag& dag, std::vector<QuestionRecord>& records) {
  const bool fresh_root = !ids_.contains(dag.root().key);
  for (auto& n : dag.nodes) {
    if (const auto* id = find(n.key)) {
      n.question_id = *id;
      continue;
    }
    n.question_id = video_id_ + "/q" + std::to_string(next_++);
    ids_.emplace(n.key, n.question_id);
    records.push_back({n.question_id, video_id_, n.program, n.question, n.qtype, std::nullopt,
                       Provenance::Unknown});
  }
  return fresh_root;
}

void QuestionIndex::adopt(const std::string& key, const std::string& id) {
  ids_.emplace(key, id);
  const std::string prefix = video_id_ + "/q";
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return;
  const auto digits = id.substr(prefix.size());
  if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 9) return;
  next_ = std::max(next_, static_cast<std::size_t>(std::stoul(digits)) + 1);
}

void attach_gold(std::vector<QuestionRecord>& records, const std::vector<QuestionDag>& dags,
                 const SceneGraph& g) {
  std::map<std::string, QuestionRecord*> by_id;
  for (auto& r : records) {
    by_id.emplace(r.id, &r);
    if (r.answer) continue;
    try {
      r.answer = execute(*r.program, g);
      r.provenance = Provenance::Executed;
    } catch (const UndefinedAnswer&) {
      r.provenance = Provenance::Unknown;
    }
  }
  for (const auto& dag : dags) {
    const auto root = by_id.find(dag.root().question_id);
    if (root == by_id.end() || !root->second->answer) continue;
    AnswerMap seeds{{dag.root_id(), {*root->second->answer, root->second->provenance}}};
    for (const auto& [node_id, entry] : propagate_answers(dag, seeds)) {
      auto* r = by_id.at(dag.node(node_id).question_id);
      if (!r->answer) {
        r->answer = entry.answer;
        r->provenance = Provenance::Propagated;
      }
    }
  }
}

VideoCorpus build_video_corpus(const SceneGraph& g, std::uint64_t seed, std::uint64_t stream,
                               const SamplerConfig& cfg, const Vocabulary& vocab,
                               const TemplateTable& templates) {
  Rng rng(seed ^ kCorpusSalt, stream);
  std::vector<Family> families = cfg.families;
  if (families.empty()) families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));

  VideoCorpus out;
  QuestionIndex index(g.video_id);
  Sampler sampler(rng, g, vocab);
  const long budget = static_cast<long>(cfg.questions_per_video) * cfg.max_attempts;
  int roots = 0;
  for (long attempt = 0; attempt < budget && roots < cfg.questions_per_video; ++attempt) {
    const Family f = families[rng.index(families.size())];
    ProgramPtr p;
    try {
      p = sampler.draw(f);
    } catch (const ProgramError&) {
      continue;  // e.g. a draw that violates variant constraints for this video
    }
    if (!p || index.find(canonical_key(*p))) continue;
    try {
      execute(*p, g);
    } catch (const UndefinedAnswer&) {
      continue;
    }
    auto dag = decompose(p, g.video_id, templates);
    index.add(dag, out.questions);
    out.dags.push_back(std::move(dag));
    ++roots;
  }

  // Closed-world stand-in for annotators listing objects that do not appear.
  const auto absent_set = absent_objects(g, vocab.objects);
  std::vector<std::string> absent(absent_set.begin(), absent_set.end());
  rng.shuffle(absent);
  if (static_cast<int>(absent.size()) > cfg.negatives_per_video)
    absent.resize(static_cast<std::size_t>(std::max(0, cfg.negatives_per_video)));
  out.negatives = {g.video_id, absent};
  for (const auto& neg : apply_negative_annotations(out.negatives, g, vocab, templates)) {
    if (index.find(canonical_key(*neg.program))) continue;
    auto dag = decompose(neg.program, g.video_id, templates);
    const std::size_t before = out.questions.size();
    index.add(dag, out.questions);
    for (std::size_t i = before; i < out.questions.size(); ++i)
      if (out.questions[i].id == dag.root().question_id) {
        out.questions[i].answer = neg.answer;
        out.questions[i].provenance = Provenance::Annotated;
      }
    out.dags.push_back(std::move(dag));
  }

  attach_gold(out.questions, out.dags, g);
  return out;
}

std::vector<VideoCorpus> build_corpus(const std::vector<SceneGraph>& graphs, std::uint64_t seed,
                                      const SamplerConfig& cfg, const Vocabulary& vocab,
                                      const TemplateTable& templates, unsigned workers) {
  std::vector<std::size_t> idx(graphs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return parallel_map(idx, workers, [&](std::size_t i) {
    return build_video_corpus(graphs[i], seed, i, cfg, vocab, templates);
  });
}

}  // namespace qdag
