#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "naive_metrics.hpp"
#include "qdag/baselines.hpp"
#include "qdag/metrics.hpp"

using namespace qdag;
using qdag::testing::Corpus;
using qdag::testing::corpus_from_programs;
using qdag::testing::sg1;

namespace {

// Prediction set answering question `program text` with `answer` text.
PredictionSet predict(const Corpus& c, const std::map<std::string, std::string>& by_program) {
  std::vector<Prediction> preds;
  for (const auto& q : c.questions) {
    const auto it = by_program.find(render_program(*q.program));
    REQUIRE_MESSAGE(it != by_program.end(), render_program(*q.program));
    preds.push_back({q.id, it->second});
  }
  return make_prediction_set(preds, c.questions);
}

const MetricRow& row(const std::vector<MetricRow>& rows, const std::string& key) {
  for (const auto& r : rows)
    if (r.key == key) return r;
  FAIL("no row " << key);
  return rows.front();
}

MetricReport report_for(const Corpus& c, const PredictionSet& p, const BanList& bans = BanList()) {
  return build_report(evaluate_corpus(c.questions, c.dags, p, bans), bans);
}

Corpus random_corpus() { return qdag::testing::make_corpus(77, 12); }

PredictionSet random_predictions(const Corpus& c, std::uint64_t seed) {
  return make_prediction_set(Predictor::random(seed, default_vocabulary()).predict_all(c.questions),
                             c.questions);
}

// Textbook formula on raw sums, independent of the two-pass implementation.
double pearson_sums(const std::vector<std::pair<double, double>>& pts) {
  double n = static_cast<double>(pts.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

}  // namespace

TEST_CASE("normalized accuracy: three-question fixture") {
  const auto c = corpus_from_programs(sg1(), {"objExists(dish)", "objExists(phone)", "objExists(cup)"});
  const auto p = predict(c, {{"objExists(dish)", "yes"}, {"objExists(phone)", "no"},
                             {"objExists(cup)", "no"}});
  const auto r = report_for(c, p);
  const auto& obj = row(r.by_type, "objectExists");
  CHECK(obj.accuracy_per_answer.at("yes").value == doctest::Approx(50.0));
  CHECK(obj.accuracy_per_answer.at("no").value == doctest::Approx(100.0));
  CHECK(*obj.accuracy.value == doctest::Approx(75.0));
  CHECK(format_cell(obj.accuracy) == "75.00");
  CHECK(format_cell(row(r.by_type, "conjunction").accuracy) == "N/A");
}

TEST_CASE("compositional accuracy: two-composition fixture") {
  const auto c = corpus_from_programs(sg1(), {"and(objExists(dish), objExists(phone))",
                                              "and(objExists(bottle), objExists(cup))"});
  const auto p = predict(c, {{"and(objExists(dish), objExists(phone))", "yes"},
                             {"and(objExists(bottle), objExists(cup))", "yes"},
                             {"objExists(dish)", "yes"},
                             {"objExists(phone)", "yes"},
                             {"objExists(bottle)", "yes"},
                             {"objExists(cup)", "no"}});
  const auto r = report_for(c, p);
  const auto& conj = row(r.by_type, "conjunction");
  CHECK(*conj.ca.value == doctest::Approx(50.0));
  CHECK_FALSE(conj.rwr.defined());
  CHECK_FALSE(conj.delta.defined());
  CHECK(*row(r.by_rule, "and").ca.value == doctest::Approx(50.0));
}

TEST_CASE("right for the wrong reasons: one-wrong and two-wrong fixture") {
  const auto c = corpus_from_programs(sg1(), {"and(objExists(dish), objExists(phone))",
                                              "and(objExists(bottle), objExists(cup))"});
  const auto p = predict(c, {{"and(objExists(dish), objExists(phone))", "yes"},
                             {"and(objExists(bottle), objExists(cup))", "yes"},
                             {"objExists(dish)", "no"},
                             {"objExists(phone)", "yes"},
                             {"objExists(bottle)", "no"},
                             {"objExists(cup)", "yes"}});
  const auto r = report_for(c, p);
  const auto& conj = row(r.by_type, "conjunction");
  CHECK(*conj.rwr.value == doctest::Approx(50.0));
  REQUIRE(conj.rwr_n.size() == 2);
  CHECK(*conj.rwr_n[0].value == doctest::Approx(100.0));
  CHECK(*conj.rwr_n[1].value == doctest::Approx(0.0));
  CHECK_FALSE(conj.ca.defined());
  CHECK(r.rwr_n_max == 2);
}

TEST_CASE("perfect predictions") {
  const auto c = random_corpus();
  const auto gold = qdag::testing::gold_predictions(c.questions);
  const auto r = report_for(c, gold);
  for (const auto& row : r.by_type) {
    if (row.accuracy.defined()) CHECK(*row.accuracy.value == doctest::Approx(100.0));
    if (row.ca.defined()) CHECK(*row.ca.value == doctest::Approx(100.0));
    CHECK_FALSE(row.rwr.defined());
    if (row.ic.defined()) CHECK(*row.ic.value == doctest::Approx(100.0));
  }
  // First/last compositions have banned children and never count.
  CHECK_FALSE(row(r.by_type, "firstLast").ca.defined());
  CHECK(r.missing_predictions == 0);
}

TEST_CASE("macro IC and rule sets") {
  std::map<std::string, CheckCounts> per_rule;
  per_rule["and-yes"].add(Verdict::Pass);
  per_rule["and-no"].add(Verdict::Fail);
  per_rule["and-no"].add(Verdict::NotApplicable);
  CHECK(*macro_ic(per_rule, {"and-yes", "and-no"}).value == doctest::Approx(50.0));
  CHECK_FALSE(macro_ic(per_rule, {"and-yes", "xor-yes"}).defined());
  CHECK_FALSE(macro_ic(per_rule, {}).defined());

  CHECK(rules_for_type(QuestionType::Interaction).size() == 2);
  CHECK(rules_for_type(QuestionType::ExistsTemporalLoc).size() == 8);
  CHECK(rules_for_type(QuestionType::InteractionTemporalLoc).size() == 8);
  CHECK(rules_for_type(QuestionType::Conjunction).size() == 4);
  CHECK(rules_for_type(QuestionType::Choose).size() == 2);
  CHECK(rules_for_type(QuestionType::Equals).size() == 2);
  CHECK(rules_for_type(QuestionType::ObjectExists).empty());
}

TEST_CASE("pearson") {
  std::string why;
  CHECK(*pearson({{1, 2}, {2, 4}, {3, 6}}) == doctest::Approx(1.0));
  CHECK(*pearson({{1, 3}, {2, 2}, {3, 1}}) == doctest::Approx(-1.0));
  CHECK_FALSE(pearson({{1, 2}}, &why));
  CHECK(why == "fewer than 2 points");
  CHECK_FALSE(pearson({{100, 2}, {100, 5}, {100, 9}}, &why));
  CHECK(why == "zero variance");

  Rng rng(3);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform01() * 100;
    pts.emplace_back(x, 0.3 * x + rng.uniform01() * 60);
  }
  CHECK(*pearson(pts) == doctest::Approx(pearson_sums(pts)).epsilon(1e-9));
}

TEST_CASE("report shape") {
  const auto c = random_corpus();
  const auto r = report_for(c, random_predictions(c, 1));
  CHECK(r.by_type.size() == 11);
  CHECK(r.by_type.back().key == "overall");
  CHECK(r.by_rule.size() == 14);
  CHECK(r.ic_rules.size() == 18);
  CHECK(r.banned_types == std::vector<std::string>{"objectsQuery", "actionTemporalLoc"});
  const auto j = r.to_json();
  CHECK(j.contains("by_question_type"));
  CHECK(j["by_question_type"].size() == 11);
  auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  CHECK(lines(r.by_type_csv()) == 12);
  CHECK(lines(r.by_rule_csv()) == 15);
  CHECK(lines(r.ic_rules_csv()) == 19);
  CHECK(r.by_type_csv().rfind("question_type,", 0) == 0);

  const auto unbanned = report_for(c, random_predictions(c, 1), BanList(std::set<QuestionType>{}));
  CHECK(unbanned.by_type.size() == 13);
}

TEST_CASE("property: partition identities over random predictions") {
  const auto c = random_corpus();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto pred = random_predictions(c, seed);
    const auto counters = evaluate_corpus(c.questions, c.dags, pred, BanList());
    std::uint64_t scored = 0, scorable = 0;
    for (const auto& [t, per] : counters.accuracy)
      for (const auto& [a, r] : per) {
        CHECK(r.num <= r.den);
        scored += r.den;
      }
    for (const auto& q : c.questions)
      if (!BanList().banned(q.qtype) && q.answer) ++scorable;
    CHECK(scored + counters.missing_predictions == scorable);

    auto check_counts = [](const CompositionCounts& cc) {
      Ratio sum;
      for (const auto& r : cc.rwr_n) sum += r;
      CHECK(sum == cc.rwr);
    };
    std::uint64_t by_type = 0, by_rule = 0;
    for (const auto& [t, cc] : counters.by_type) {
      check_counts(cc);
      by_type += cc.ca.den + cc.rwr.den;
    }
    for (const auto& [r, cc] : counters.by_rule) {
      check_counts(cc);
      by_rule += cc.ca.den + cc.rwr.den;
    }
    CHECK(by_type == by_rule);
    CHECK(by_type > 0);
  }
}

TEST_CASE("property: streaming aggregation equals the naive reference") {
  const auto c = random_corpus();
  for (std::uint64_t seed : {5u, 6u}) {
    auto pred = random_predictions(c, seed);
    // Drop some predictions so missing answers are exercised too.
    std::size_t i = 0;
    for (auto it = pred.begin(); it != pred.end();) it = (++i % 9 == 0) ? pred.erase(it) : std::next(it);
    for (const auto& bans : {BanList(), BanList(std::set<QuestionType>{}),
                             BanList::parse("conjunction,objectsQuery")}) {
      const auto streamed = evaluate_corpus(c.questions, c.dags, pred, bans, 1);
      const auto naive = qdag::testing::naive_counters(c.questions, c.dags, pred, bans);
      CHECK(streamed.accuracy == naive.accuracy);
      CHECK(streamed.by_type == naive.by_type);
      CHECK(streamed.by_rule == naive.by_rule);
      CHECK(streamed.checks == naive.checks);
      CHECK(streamed.dags == naive.dags);
      CHECK(streamed.missing_predictions == naive.missing_predictions);
      CHECK(streamed.max_children == naive.max_children);
      CHECK(evaluate_corpus(c.questions, c.dags, pred, bans, 4) == streamed);
    }
  }
}

TEST_CASE("property: merging per-video partials is associative") {
  const auto c = random_corpus();
  const auto pred = random_predictions(c, 8);
  const BanList bans;
  std::map<std::string, std::pair<std::vector<const QuestionRecord*>, std::vector<const QuestionDag*>>> parts;
  for (const auto& q : c.questions) parts[q.video_id].first.push_back(&q);
  for (const auto& d : c.dags) parts[d.video_id].second.push_back(&d);
  std::vector<MetricCounters> partial;
  for (const auto& [v, p] : parts) partial.push_back(evaluate_video(p.first, p.second, pred, bans));

  MetricCounters left, right_tail, right;
  for (const auto& p : partial) left.merge(p);
  for (std::size_t i = 1; i < partial.size(); ++i) right_tail.merge(partial[i]);
  right.merge(partial[0]);
  right.merge(right_tail);
  CHECK(left == right);
  CHECK(left == evaluate_corpus(c.questions, c.dags, pred, bans));
}

TEST_CASE("predictions: unknown ids and off-alphabet answers") {
  const auto c = corpus_from_programs(sg1(), {"objExists(dish)"});
  std::vector<std::string> unknown;
  const auto p = make_prediction_set({{c.questions[0].id, "maybe"}, {"v9/q0", "yes"}}, c.questions,
                                     &unknown);
  CHECK(unknown == std::vector<std::string>{"v9/q0"});
  REQUIRE(p.size() == 1);
  CHECK(p.begin()->second != Answer::yes());
  CHECK(p.begin()->second != Answer::no());
}
