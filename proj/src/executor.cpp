#include "qdag/executor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace qdag {

namespace {

constexpr int kNoFrame = std::numeric_limits<int>::max();

bool any_in(const std::vector<int>& frames, const FrameWindow& w) {
  const auto it = std::lower_bound(frames.begin(), frames.end(), w.lo);
  return it != frames.end() && *it <= w.hi;
}

bool overlaps(const ActionInterval& a, const FrameWindow& w) {
  return !w.empty() && a.start <= w.hi && a.end >= w.lo;
}

// Earliest frame in `w` at which a boolean event holds, or kNoFrame.
int earliest_frame(const Program& e, const SceneGraph& g, const FrameWindow& w) {
  int best = kNoFrame;
  if (e.op() == Op::ActionExists) {
    if (const auto* a = g.find_action(e.label()); a && overlaps(*a, w)) best = std::max(a->start, w.lo);
    return best;
  }
  // InteractionExists
  const auto& subj = e.arg(0).label();
  const auto& rel = e.arg(1).label();
  const auto& obj = e.arg(2).label();
  for (const auto& r : g.relationships) {
    if (r.subject != subj || r.relation != rel || r.object != obj) continue;
    const auto it = std::lower_bound(r.frames.begin(), r.frames.end(), w.lo);
    if (it != r.frames.end() && *it <= w.hi) best = std::min(best, *it);
  }
  return best;
}

// Earliest in-window frame per candidate of an open query body.
struct Span {
  int first = kNoFrame;
};

std::map<std::string, Span> open_query_spans(const Program& body, const SceneGraph& g,
                                             const FrameWindow& w) {
  std::map<std::string, Span> out;
  if (w.empty()) return out;
  if (body.op() == Op::ObjectsQuery) {
    const auto& subj = body.arg(0).label();
    const auto& rel = body.arg(1).label();
    for (const auto& r : g.relationships) {
      if (r.subject != subj || r.relation != rel) continue;
      for (int f : r.frames) {
        if (!w.contains(f)) continue;
        auto& s = out[r.object];
        s.first = std::min(s.first, f);
      }
    }
  } else {  // ActionsQuery
    for (const auto& a : g.actions) {
      if (!overlaps(a, w)) continue;
      auto& s = out[a.label];
      s.first = std::max(a.start, w.lo);
    }
  }
  return out;
}

class Evaluator {
 public:
  explicit Evaluator(const SceneGraph& g) : g_(g) {}

  Answer eval(const Program& p, const FrameWindow& w) {
    switch (p.op()) {
      case Op::ObjExists: {
        const auto& o = p.label();
        for (const auto& r : g_.relationships)
          if ((r.object == o || r.subject == o) && any_in(r.frames, w)) return Answer::yes();
        return Answer::no();
      }
      case Op::RelationExists: {
        for (const auto& r : g_.relationships)
          if (r.relation == p.label() && any_in(r.frames, w)) return Answer::yes();
        return Answer::no();
      }
      case Op::ActionExists:
      case Op::InteractionExists:
        return Answer::boolean(earliest_frame(p, g_, w) != kNoFrame);
      case Op::ObjectsQuery:
      case Op::ActionsQuery: {
        const auto spans = open_query_spans(p, g_, w);
        if (spans.empty()) throw UndefinedAnswer("empty " + std::string(function_name(p)) + " set");
        std::string joined;
        for (const auto& [label, span] : spans) {
          if (!joined.empty()) joined += ", ";
          joined += label;
        }
        return Answer::label(joined);
      }
      case Op::First:
      case Op::Last:
        return select_by_time(p, w);
      case Op::Longest:
      case Op::Shortest:
        return select_by_duration(p, w);
      case Op::And:
        return Answer::boolean(eval(p.arg(0), w).as_bool() && eval(p.arg(1), w).as_bool());
      case Op::Xor:
        return Answer::boolean(eval(p.arg(0), w).as_bool() && !eval(p.arg(1), w).as_bool());
      case Op::EqualsObject:
        return Answer::boolean(eval(p.arg(1), w).as_label() == p.arg(0).label());
      case Op::LongerThan:
      case Op::ShorterThan: {
        const auto* a1 = g_.find_action(p.labels()[0]);
        const auto* a2 = g_.find_action(p.labels()[1]);
        if (!a1 || !a2) return Answer::no();
        return Answer::boolean(p.op() == Op::LongerThan ? a1->duration() > a2->duration()
                                                        : a1->duration() < a2->duration());
      }
      case Op::OccursBefore:
      case Op::OccursAfter: {
        const int t1 = earliest_frame(p.arg(0), g_, w);
        const int t2 = earliest_frame(p.arg(1), g_, w);
        if (t1 == kNoFrame || t2 == kNoFrame) return Answer::no();
        return Answer::boolean(p.op() == Op::OccursBefore ? t1 < t2 : t1 > t2);
      }
      case Op::ChooseObject:
        return choose(p, w, [&](int i) { return Answer::label(p.arg(i).arg(0).label()); });
      case Op::ChooseTime:
        return choose(p, w, [](int i) {
          return Answer::temporal(i == 0 ? TemporalToken::Before : TemporalToken::After);
        });
      case Op::LongerChoose:
      case Op::ShorterChoose:
        return choose(p, w, [&](int i) { return Answer::label(p.arg(i).labels()[0]); });
      case Op::Localized: {
        const auto inner = localized_window(p, g_, w);
        const Program& body = p.arg(0);
        if (!inner) {
          if (is_boolean(body)) return Answer::no();
          throw UndefinedAnswer("localizer anchored on an action absent from " + g_.video_id);
        }
        return eval(body, *inner);
      }
    }
    throw UndefinedAnswer("unsupported program");
  }

 private:
  template <class Pick>
  Answer choose(const Program& p, const FrameWindow& w, Pick pick) {
    const bool a = eval(p.arg(0), w).as_bool();
    const bool b = eval(p.arg(1), w).as_bool();
    if (a == b)
      throw UndefinedAnswer(std::string(function_name(p)) +
                            (a ? ": both options hold" : ": neither option holds"));
    return pick(a ? 0 : 1);
  }

  // Resolves a (possibly localized) open-query body to its candidate spans.
  std::map<std::string, Span> body_spans(const Program& body, const FrameWindow& w) {
    const auto inner = localized_window(body, g_, w);
    if (!inner) throw UndefinedAnswer("localizer anchored on an action absent from " + g_.video_id);
    return open_query_spans(body.unwrap_localized(), g_, *inner);
  }

  Answer select_by_time(const Program& p, const FrameWindow& w) {
    const auto spans = body_spans(p.arg(0), w);
    if (spans.empty()) throw UndefinedAnswer("empty candidate set");
    const bool want_first = p.op() == Op::First;
    const std::string* best = nullptr;
    int best_frame = 0;
    for (const auto& [label, span] : spans) {  // map order breaks ties lexicographically
      const int f = span.first;
      if (!best || (want_first ? f < best_frame : f > best_frame)) {
        best = &label;
        best_frame = f;
      }
    }
    return Answer::label(*best);
  }

  Answer select_by_duration(const Program& p, const FrameWindow& w) {
    const auto spans = body_spans(p.arg(0), w);
    if (spans.empty()) throw UndefinedAnswer("empty action set");
    const bool want_longest = p.op() == Op::Longest;
    const ActionInterval* best = nullptr;
    for (const auto& [label, span] : spans) {
      const auto* a = g_.find_action(label);
      if (!best || (want_longest ? a->duration() > best->duration()
                                 : a->duration() < best->duration()))
        best = a;
    }
    return Answer::label(best->label);
  }

  const SceneGraph& g_;
};

}  // namespace

std::optional<FrameWindow> localized_window(const Program& p, const SceneGraph& g,
                                            const FrameWindow& outer) {
  if (p.op() != Op::Localized) return outer;
  const auto* a = g.find_action(p.arg(1).label());
  if (!a) return std::nullopt;
  FrameWindow w;
  switch (*p.localizer()) {
    case Localizer::Before:
      w = {1, a->start - 1};
      break;
    case Localizer::After:
      w = {a->end + 1, g.num_frames};
      break;
    case Localizer::While:
      w = {a->start, a->end};
      break;
    case Localizer::Between: {
      const auto* b = g.find_action(p.arg(2).label());
      if (!b) return std::nullopt;
      auto key = [](const ActionInterval* x) { return std::tie(x->start, x->end, x->label); };
      const auto* earlier = key(a) <= key(b) ? a : b;
      const auto* later = earlier == a ? b : a;
      w = {earlier->end + 1, later->start - 1};
      break;
    }
  }
  const auto out = outer.intersect(w);
  return out.empty() ? FrameWindow::none() : out;
}

Answer execute(const Program& p, const SceneGraph& g) {
  return Evaluator(g).eval(p, FrameWindow::whole(g.num_frames));
}

}  // namespace qdag
