#include <doctest.h>

#include "fixtures.hpp"
#include "qdag/executor.hpp"
#include "qdag/propagation.hpp"
#include "qdag/random.hpp"

using namespace qdag;
using qdag::testing::P;
using qdag::testing::sg1;

namespace {

AnswerMap seed(const std::string& id, Answer a) { return {{id, {std::move(a), Provenance::Executed}}}; }

std::optional<Answer> at(const AnswerMap& m, const std::string& id) {
  const auto it = m.find(id);
  if (it == m.end()) return std::nullopt;
  return it->second.answer;
}

// Oracle answers for every node of `d` that has a defined answer on `g`.
AnswerMap executed(const QuestionDag& d, const SceneGraph& g) {
  AnswerMap m;
  for (const auto& n : d.nodes) try {
      m.emplace(n.id, AnswerEntry{execute(*n.program, g), Provenance::Executed});
    } catch (const UndefinedAnswer&) {
    }
  return m;
}

}  // namespace

TEST_CASE("propagate: xor yes fixes both operands") {
  const auto d = decompose(P("xor(actionExists(throwing a blanket), actionExists(holding a blanket))"), "v");
  const auto out = propagate_answers(d, seed("q", Answer::yes()));
  CHECK(d.node("s1").question == "Is the person throwing a blanket?");
  CHECK(at(out, "s1") == Answer::yes());
  CHECK(at(out, "s2") == Answer::no());
  CHECK(out.at("s1").provenance == Provenance::Propagated);
  CHECK(out.at("q").provenance == Provenance::Executed);
}

TEST_CASE("propagate: interaction answers") {
  const auto d = decompose(
      P("interactionExists(objExists(person), relationExists(holding), objExists(dish))"), "v");
  REQUIRE(d.nodes.size() == 4);
  const auto no = propagate_answers(d, seed("q", Answer::no()));
  CHECK(no.size() == 1);
  const auto yes = propagate_answers(d, seed("q", Answer::yes()));
  CHECK(yes.size() == 4);
  for (const auto& id : {"s1", "s2", "s3"}) CHECK(at(yes, id) == Answer::yes());

  const auto oq = decompose(P("objects(objExists(person), relationExists(touching))"), "v");
  CHECK(propagate_answers(oq, seed("q", Answer::label("dish"))).size() == 1);
}

TEST_CASE("propagate: single-child contrapositives") {
  const auto d = decompose(P("and(objExists(dish), objExists(cup))"), "v");
  auto seeds = seed("q", Answer::no());
  seeds.emplace("s1", AnswerEntry{Answer::yes(), Provenance::Executed});
  CHECK(at(propagate_answers(d, seeds), "s2") == Answer::no());
  CHECK(propagate_answers(d, seed("q", Answer::no())).size() == 1);

  const auto x = decompose(P("xor(objExists(dish), objExists(cup))"), "v");
  auto xs = seed("q", Answer::no());
  xs.emplace("s1", AnswerEntry{Answer::yes(), Provenance::Executed});
  CHECK(at(propagate_answers(x, xs), "s2") == Answer::yes());
}

TEST_CASE("propagate: choose and equals") {
  const auto c = decompose(P("chooseObject(equals(objExists(dish), first(objects(objExists(person), "
                             "relationExists(touching)))), equals(objExists(cup), first(objects("
                             "objExists(person), relationExists(touching)))))"),
                           "v");
  const auto out = propagate_answers(c, seed("q", Answer::label("dish")));
  CHECK(at(out, c.root().args[0]) == Answer::yes());
  CHECK(at(out, c.root().args[1]) == Answer::no());
  // equals-yes on the chosen side names the first object.
  const auto& eq = c.node(c.root().args[0]);
  CHECK(at(out, eq.args[1]) == Answer::label("dish"));
  CHECK(at(out, eq.args[0]) == Answer::yes());
}

TEST_CASE("propagate: contradictions throw, seeds are kept") {
  const auto d = decompose(P("and(objExists(dish), objExists(cup))"), "v");
  auto seeds = seed("q", Answer::yes());
  seeds.emplace("s1", AnswerEntry{Answer::no(), Provenance::Annotated});
  CHECK_THROWS_AS(propagate_answers(d, seeds), PropagationContradiction);

  auto agree = seed("q", Answer::yes());
  agree.emplace("s1", AnswerEntry{Answer::yes(), Provenance::Annotated});
  const auto out = propagate_answers(d, agree);
  CHECK(out.at("s1").provenance == Provenance::Annotated);
  CHECK(out.at("s2").provenance == Provenance::Propagated);
}

TEST_CASE("property: propagation agrees with execution, is idempotent and monotone") {
  const auto corpus = qdag::testing::make_corpus(31, 8);
  std::map<std::string, const SceneGraph*> graphs;
  for (const auto& g : corpus.graphs) graphs[g.video_id] = &g;
  Rng rng(4);
  std::size_t derived = 0;
  for (const auto& d : corpus.dags) {
    const auto& g = *graphs.at(d.video_id);
    const auto oracle = executed(d, g);
    if (!oracle.count("q")) continue;
    const auto root_only = AnswerMap{{"q", oracle.at("q")}};
    const auto out = propagate_answers(d, root_only);
    for (const auto& [id, e] : out) {
      if (oracle.count(id)) CHECK(e.answer == oracle.at(id).answer);
      if (e.provenance == Provenance::Propagated) ++derived;
    }
    CHECK(propagate_answers(d, out) == out);

    // Seeding extra oracle answers only ever adds entries.
    AnswerMap more = root_only;
    for (const auto& [id, e] : oracle)
      if (rng.bernoulli(0.5)) more.emplace(id, e);
    const auto bigger = propagate_answers(d, more);
    for (const auto& [id, e] : out) {
      REQUIRE(bigger.count(id));
      CHECK(bigger.at(id).answer == e.answer);
    }
    CHECK(audit_gold(d, bigger).empty());
  }
  CHECK(derived > 50);
}

TEST_CASE("negative annotations on the ten-frame fixture") {
  const auto g = sg1();
  const auto qs = apply_negative_annotations({"v1", {"doorknob"}}, g, default_vocabulary());
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].question == "Does a doorknob exist?");
  CHECK(qs[0].answer == Answer::no());
  CHECK(qs[0].provenance == Provenance::Annotated);
  CHECK(execute(*qs[0].program, g) == Answer::no());

  const auto& loc = *qs[1].program;
  REQUIRE(loc.op() == Op::Localized);
  CHECK(loc.localizer() == Localizer::Before);
  CHECK(loc.arg(0).label() == "bottle");
  CHECK(g.find_action(loc.arg(1).label()) == nullptr);
  CHECK(qs[1].answer == Answer::no());
  CHECK(execute(loc, g) == Answer::no());
  CHECK(qs[1].question.rfind("Does a bottle exist before ", 0) == 0);

  CHECK(apply_negative_annotations({"v1", {}}, g, default_vocabulary()).empty());
  CHECK_THROWS_AS(apply_negative_annotations({"v2", {"doorknob"}}, g, default_vocabulary()),
                  std::invalid_argument);
}

TEST_CASE("audit: oracle answers are clean, a flipped child is reported") {
  const auto g = sg1();
  const auto d = decompose(
      P("interactionExists(objExists(person), relationExists(holding), objExists(bottle))"), "v1");
  auto answers = executed(d, g);
  CHECK(audit_gold(d, answers).empty());

  answers.at("s3").answer = Answer::no();
  const auto v = audit_gold(d, answers);
  std::set<std::string> rules;
  for (const auto& c : v) rules.insert(c.check.rule_id);
  CHECK(rules.contains("interaction-yes"));
  // The contrapositive also fires on the same contradiction: checks double count.
  CHECK(rules == std::set<std::string>{"interaction-yes", "interaction-no"});

  CHECK(audit_gold(d, {}).empty());
}
