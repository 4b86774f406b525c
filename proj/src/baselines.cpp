#include "qdag/baselines.hpp"

#include "qdag/executor.hpp"
#include "qdag/random.hpp"

namespace qdag {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Predictor Predictor::oracle(const std::vector<SceneGraph>& graphs) {
  Predictor p;
  p.kind_ = Kind::Oracle;
  for (const auto& g : graphs) p.graphs_.emplace(g.video_id, g);
  return p;
}

Predictor Predictor::most_likely(const std::vector<QuestionRecord>& train,
                                 const std::string& fallback) {
  Predictor p;
  p.kind_ = Kind::MostLikely;
  p.constant_ = fallback;
  std::map<QuestionType, std::map<std::string, std::size_t>> hist;
  for (const auto& q : train)
    if (q.answer) ++hist[q.qtype][q.answer->to_string()];
  for (const auto& [t, counts] : hist) {
    // std::map iterates answers in lexicographic order, so strict > keeps the smallest on ties.
    const std::pair<const std::string, std::size_t>* best = nullptr;
    for (const auto& entry : counts)
      if (!best || entry.second > best->second) best = &entry;
    p.modes_[t] = best->first;
  }
  for (auto t : kAllQuestionTypes)
    if (!p.modes_.contains(t)) p.unfit_.insert(t);
  return p;
}

Predictor Predictor::constant(std::string answer) {
  Predictor p;
  p.kind_ = Kind::Constant;
  p.constant_ = std::move(answer);
  return p;
}

Predictor Predictor::random(std::uint64_t seed, const Vocabulary& vocab) {
  Predictor p;
  p.kind_ = Kind::Random;
  p.seed_ = seed;
  p.objects_.assign(vocab.objects.begin(), vocab.objects.end());
  p.actions_.assign(vocab.actions.begin(), vocab.actions.end());
  return p;
}

std::string Predictor::predict(const QuestionRecord& q) const {
  switch (kind_) {
    case Kind::Oracle:
      return execute(*q.program, graphs_.at(q.video_id)).to_string();
    case Kind::MostLikely: {
      const auto it = modes_.find(q.qtype);
      return it == modes_.end() ? constant_ : it->second;
    }
    case Kind::Constant:
      return constant_;
    case Kind::Random:
      break;
  }
  Rng rng(seed_, fnv1a(q.id));
  const Program& p = q.program->unwrap_localized();
  switch (answer_kind(*q.program)) {
    case AnswerKind::Bool:
      return rng.bernoulli(0.5) ? "yes" : "no";
    case AnswerKind::Temporal:
      return rng.bernoulli(0.5) ? "before" : "after";
    case AnswerKind::Label:
      break;
  }
  switch (p.op()) {
    case Op::ChooseObject:
      return p.arg(rng.index(2)).arg(0).label();
    case Op::LongerChoose:
    case Op::ShorterChoose:
      return p.arg(rng.index(2)).labels()[0];
    case Op::Longest:
    case Op::Shortest:
    case Op::ActionsQuery:
      return actions_.empty() ? "no" : rng.pick(actions_);
    default:
      return objects_.empty() ? "no" : rng.pick(objects_);
  }
}

std::vector<Prediction> Predictor::predict_all(const std::vector<QuestionRecord>& qs) const {
  std::vector<Prediction> out;
  out.reserve(qs.size());
  for (const auto& q : qs) {
    try {
      out.push_back({q.id, predict(q)});
    } catch (const UndefinedAnswer&) {
    }
  }
  return out;
}

}  // namespace qdag
