// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <unistd.h>

#include "fixtures.hpp"
#include "naive_metrics.hpp"
#include "qdag/baselines.hpp"
#include "qdag/executor.hpp"
#include "qdag/io.hpp"
#include "qdag/metrics.hpp"
#include "qdag/parallel.hpp"
#include "qdag/propagation.hpp"
#include "qdag/random.hpp"

namespace fs = std::filesystem;
using namespace qdag;
using qdag::testing::Corpus;

namespace {

constexpr double kExact = 1e-9;        // "exact" percentages, up to float rounding
constexpr double kOracleSeconds = 30;  // criteria 2 and 3
constexpr double kDecomposeSeconds = 1;
constexpr int kMinDags = 500;
constexpr int kRandomSets = 1000;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool near(double a, double b) { return std::fabs(a - b) <= kExact; }

const Corpus& big_corpus() {
  static const Corpus c = qdag::testing::make_corpus(7, 30, 24, default_workers());
  return c;
}

MetricReport report(const Corpus& c, const Predictor& p, const BanList& bans = BanList()) {
  const auto pred = make_prediction_set(p.predict_all(c.questions), c.questions);
  return build_report(evaluate_corpus(c.questions, c.dags, pred, bans, default_workers()), bans);
}

const MetricRow& row(const std::vector<MetricRow>& rows, const std::string& key) {
  for (const auto& r : rows)
    if (r.key == key) return r;
  throw std::logic_error("missing row " + key);
}

// 1
Outcome decomposition_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = decompose(qdag::testing::P("first(objects(objExists(person), relationExists(touching)))"), "v1");
  const double dt = seconds_since(t0);
  std::set<std::string> ids;
  for (const auto& n : d.nodes) ids.insert(n.id);
  std::set<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& e : d.edges) edges.insert({e.parent, e.child, std::string(to_string(e.rule))});
  const bool ok = ids == std::set<std::string>{"q", "s1", "s2", "s3"} &&
                  edges == decltype(edges){{"q", "s1", "first"},
                                           {"s1", "s2", "interaction"},
                                           {"s1", "s3", "interaction"}} &&
                  dt < kDecomposeSeconds;
  return {ok, fmt("%zu nodes, %zu edges, %.4fs", d.nodes.size(), d.edges.size(), dt)};
}

// 2
Outcome oracle_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& c = big_corpus();
  const auto oracle = Predictor::oracle(c.graphs);
  const auto pred = make_prediction_set(oracle.predict_all(c.questions), c.questions);
  std::size_t passed = 0, failed = 0;
  for (const auto& d : c.dags) {
    const auto counts = dag_consistency(d, lookup_in(d, pred), BanList(std::set<QuestionType>{}));
    passed += counts.passed;
    failed += counts.failed;
  }
  const double dt = seconds_since(t0);
  const bool ok = c.dags.size() >= kMinDags && failed == 0 && passed > 0 && dt < kOracleSeconds;
  return {ok, fmt("%zu DAGs, %zu/%zu applicable checks pass, %.2fs", c.dags.size(), passed,
                  passed + failed, dt)};
}

// 3
Outcome propagation_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& c = big_corpus();
  std::map<std::string, const SceneGraph*> graphs;
  for (const auto& g : c.graphs) graphs[g.video_id] = &g;
  std::size_t compared = 0, disagree = 0, contradictions = 0;
  for (const auto& d : c.dags) {
    const auto& g = *graphs.at(d.video_id);
    AnswerMap seed{{d.root_id(), {execute(*d.root().program, g), Provenance::Executed}}};
    AnswerMap out;
    try {
      out = propagate_answers(d, seed);
    } catch (const PropagationContradiction&) {
      ++contradictions;
      continue;
    }
    for (const auto& [id, e] : out) {
      try {
        const auto truth = execute(*d.node(id).program, g);
        ++compared;
        if (!(truth == e.answer)) ++disagree;
      } catch (const UndefinedAnswer&) {
      }
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = disagree == 0 && contradictions == 0 && compared > c.dags.size() &&
                  dt < kOracleSeconds;
  return {ok, fmt("%zu node answers compared, %zu disagree, %zu contradictions, %.2fs", compared,
                  disagree, contradictions, dt)};
}

// 4
Outcome most_likely_binary() {
  const auto& c = big_corpus();
  const auto r = report(c, Predictor::most_likely(c.questions));
  std::map<QuestionType, std::set<std::string>> answers;
  std::set<QuestionType> non_bool;
  for (const auto& q : c.questions) {
    if (!q.answer) continue;
    if (!q.answer->is_bool()) non_bool.insert(q.qtype);
    answers[q.qtype].insert(q.answer->to_string());
  }
  std::size_t types = 0;
  bool ok = true;
  std::string seen;
  for (const auto& [t, a] : answers) {
    if (non_bool.contains(t) || a != std::set<std::string>{"no", "yes"} || BanList().banned(t))
      continue;
    const auto cell = format_cell(row(r.by_type, std::string(to_string(t))).accuracy);
    ok = ok && cell == "50.00";
    seen += std::string(seen.empty() ? "" : ", ") + std::string(to_string(t)) + "=" + cell;
    ++types;
  }
  return {ok && types > 0, fmt("%zu binary types: ", types) + seen};
}

// 5
Outcome most_likely_conjunction() {
  const auto c = qdag::testing::corpus_from_programs(
      qdag::testing::sg1(),
      {"and(objExists(dish), objExists(phone))", "xor(objExists(dish), objExists(bottle))",
       "xor(objExists(phone), objExists(bottle))", "xor(objExists(bottle), objExists(dish))"});
  const auto ml = Predictor::most_likely(c.questions);
  const auto r = report(c, ml);
  const auto& a = row(r.by_rule, "and").ca;
  const auto& x = row(r.by_rule, "xor").ca;
  const bool ok = ml.modes().at(QuestionType::Conjunction) == "no" &&
                  ml.modes().at(QuestionType::ObjectExists) == "yes" && a.defined() &&
                  x.defined() && near(*a.value, 0.0) && near(*x.value, 100.0);
  return {ok, "And-CA=" + format_cell(a) + " Xor-CA=" + format_cell(x)};
}

// 6
Outcome ideal_model() {
  const auto& c = big_corpus();
  const auto r = report(c, Predictor::oracle(c.graphs));
  std::size_t defined = 0;
  bool ok = true;
  for (const auto* rows : {&r.by_type, &r.by_rule})
    for (const auto& row : *rows) {
      for (const Cell* cell : {&row.accuracy, &row.ca, &row.ic}) {
        if (!cell->defined()) continue;
        ++defined;
        ok = ok && near(*cell->value, 100.0);
      }
      ok = ok && !row.rwr.defined();
      for (const auto& n : row.rwr_n) ok = ok && !n.defined();
    }
  return {ok && defined > 0, fmt("%zu defined cells all 100.00, RWR undefined", defined)};
}

// Random prediction set: per-set correctness and drop rates.
PredictionSet random_set(const Corpus& c, std::uint64_t k) {
  Rng rng(0xACCE, k);
  const double p_correct = rng.uniform01();
  const double p_missing = 0.2 * rng.uniform01();
  const auto& vocab = default_vocabulary();
  const std::vector<std::string> labels(vocab.objects.begin(), vocab.objects.end());
  PredictionSet out;
  for (const auto& q : c.questions) {
    if (rng.bernoulli(p_missing)) continue;
    const bool right = rng.bernoulli(p_correct);
    if (q.answer && right) {
      out.emplace(q.id, *q.answer);
      continue;
    }
    switch (answer_kind(*q.program)) {
      case AnswerKind::Bool:
        out.emplace(q.id, q.answer ? Answer::boolean(!q.answer->is_yes()) : Answer::boolean(rng.bernoulli(0.5)));
        break;
      case AnswerKind::Temporal:
        out.emplace(q.id, Answer::temporal(rng.bernoulli(0.5) ? TemporalToken::Before : TemporalToken::After));
        break;
      case AnswerKind::Label:
        out.emplace(q.id, Answer::label(rng.pick(labels)));
        break;
    }
  }
  return out;
}

// 7
Outcome metric_identities() {
  const auto c = qdag::testing::make_corpus(70, 6);
  std::size_t violations = 0, mismatches = 0, cells = 0;
  auto in_range = [&](const Cell& x) {
    if (!x.defined()) return;
    ++cells;
    if (*x.value < -kExact || *x.value > 100 + kExact) ++violations;
  };
  const BanList bans;
  for (int k = 0; k < kRandomSets; ++k) {
    const auto pred = random_set(c, static_cast<std::uint64_t>(k));
    const auto counters = evaluate_corpus(c.questions, c.dags, pred, bans);
    if (!(counters == qdag::testing::naive_counters(c.questions, c.dags, pred, bans))) ++mismatches;

    // Composition count from scratch: every eligible parent lands in exactly one of CA / RWR.
    std::uint64_t eligible = 0;
    for (const auto& [t, cc] : counters.by_type) {
      eligible += cc.ca.den + cc.rwr.den;
      Ratio sum;
      for (const auto& r : cc.rwr_n) sum += r;
      if (!(sum == cc.rwr)) ++violations;
    }
    std::uint64_t rule_total = 0;
    for (const auto& [r, cc] : counters.by_rule) rule_total += cc.ca.den + cc.rwr.den;
    if (eligible != rule_total) ++violations;

    const auto rep = build_report(counters, bans);
    for (const auto* rows : {&rep.by_type, &rep.by_rule})
      for (const auto& row : *rows) {
        for (const Cell* x : {&row.accuracy, &row.ca, &row.rwr, &row.delta, &row.ic}) {
          if (x == &row.delta) continue;
          in_range(*x);
        }
        for (const auto& n : row.rwr_n) in_range(n);
        // Delta = RWR - CA wherever both are defined.
        if (row.rwr.defined() && row.ca.defined()) {
          if (!row.delta.defined() || !near(*row.delta.value, *row.rwr.value - *row.ca.value))
            ++violations;
        } else if (row.delta.defined()) {
          ++violations;
        }
        // Weighted RWR-n mean = RWR.
        if (row.rwr.defined()) {
          double num = 0, den = 0;
          for (const auto& n : row.rwr_n)
            if (n.defined()) {
              num += *n.value * static_cast<double>(n.den);
              den += static_cast<double>(n.den);
            }
          if (den != static_cast<double>(row.rwr.den) || std::fabs(num / den - *row.rwr.value) > 1e-6)
            ++violations;
        }
      }
  }
  return {violations == 0 && mismatches == 0,
          fmt("%d prediction sets on %zu questions, %zu cells checked, %zu identity violations, "
              "%zu streaming/naive mismatches",
              kRandomSets, c.questions.size(), cells, violations, mismatches)};
}

// 8
Outcome ic_undefined() {
  const auto& c = big_corpus();
  const auto r = report(c, Predictor::constant("yes"));
  const auto& inter = row(r.by_type, "interaction");
  const auto& overall = r.by_type.back();
  std::size_t zero_rules = 0;
  for (const auto& rule : r.ic_rules)
    if (rule.counts.applicable() == 0) ++zero_rules;
  const bool ok = !inter.ic.defined() && !overall.ic.defined() && zero_rules > 0;
  return {ok, fmt("%zu rules with no applicable check; interaction IC=%s, overall IC=%s", zero_rules,
                  format_cell(inter.ic).c_str(), format_cell(overall.ic).c_str())};
}

// 9
Outcome banned_exclusion() {
  const auto& c = big_corpus();
  bool ok = true;
  std::string detail;
  for (const auto& p : {Predictor::oracle(c.graphs), Predictor::random(3, default_vocabulary()),
                        Predictor::most_likely(c.questions)}) {
    const auto r = report(c, p);
    for (const std::string key : {"firstLast", "longestShortestAction"}) {
      const auto& x = row(r.by_type, key);
      ok = ok && !x.ca.defined() && !x.rwr.defined();
    }
    for (const std::string key : {"first", "last"}) {
      const auto& x = row(r.by_rule, key);
      ok = ok && !x.ca.defined() && !x.rwr.defined();
    }
  }
  return {ok, "First/Last and Longest/Shortest CA/RWR are N/A for oracle, random and most-likely"};
}

// 10
Outcome correlation() {
  const auto& c = big_corpus();
  const auto no = report(c, Predictor::constant("no")).correlation;
  const auto oracle = report(c, Predictor::oracle(c.graphs)).correlation;
  const bool no_ok = no.r && *no.r < 0;
  const bool oracle_ok = !oracle.r && oracle.diagnostic == "zero variance";
  std::string d = "constant-no: " + (no.r ? fmt("r=%.4f", *no.r) : "r undefined (" + no.diagnostic + ")") +
                  fmt(" over %zu DAGs", no.points.size()) + "; oracle: " +
                  (oracle.r ? fmt("r=%.4f", *oracle.r) : "r undefined (" + oracle.diagnostic + ")");
  return {no_ok && oracle_ok, d};
}

// 11
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
  for (const auto& n : names) {
    if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
      why = n + " differs";
      return false;
    }
  }
  if (names.empty()) why = "no output files";
  return !names.empty();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("qdag_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string bin = QDAG_BIN;
  const std::string vocab = std::string(" --vocab ") + QDAG_SOURCE_DIR + "/config/vocab.json";
  const std::string cfg = vocab + " --templates " + QDAG_SOURCE_DIR + "/config/templates.json";
  auto run = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  std::string why;
  bool ok = true;
  const std::vector<std::string> workers{"1", "4", "1"};
  for (std::size_t i = 0; i < workers.size(); ++i) {
    const auto dir = root / ("run" + std::to_string(i));
    fs::create_directories(dir / "gen");
    ok = ok && run("gen --seed 7 --videos 20 --out " + (dir / "gen").string() + " --workers " +
                   workers[i] + cfg);
    // Root programs of the generated DAGs, re-decomposed from scratch.
    if (ok && i == 0) {
      JsonlWriter w(root / "programs.jsonl");
      for (const auto& d : read_dags(dir / "gen" / "dags.jsonl"))
        w.write({{"video_id", d.video_id}, {"program", render_program(*d.root().program)}});
    }
    fs::create_directories(dir / "dec");
    ok = ok && run("decompose --programs " + (root / "programs.jsonl").string() + " --out-dags " +
                   (dir / "dec" / "dags.jsonl").string() + " --out-questions " +
                   (dir / "dec" / "questions.jsonl").string() + cfg);
    for (const std::string kind : {"random", "most-likely"}) {
      ok = ok && run("evaluate --dags " + (dir / "gen" / "dags.jsonl").string() + " --questions " +
                     (dir / "gen" / "questions.jsonl").string() + " --baseline " + kind +
                     " --seed 5 --formats json,csv --out-dir " + (dir / ("eval-" + kind)).string() +
                     " --workers " + workers[i] + vocab);
    }
  }
  if (!ok) why = "a subcommand exited nonzero";
  for (std::size_t i = 1; ok && i < workers.size(); ++i)
    for (const std::string sub : {"gen", "dec", "eval-random", "eval-most-likely"})
      ok = ok && same_tree(root / "run0" / sub, root / ("run" + std::to_string(i)) / sub, why);
  fs::remove_all(root);
  return {ok, ok ? "gen, decompose and evaluate byte-identical across reruns and workers 1/4/1"
                 : why};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"decomposition fidelity", decomposition_fidelity},
      {"oracle consistency", oracle_consistency},
      {"propagation/execution agreement", propagation_agreement},
      {"most-likely binary accuracy 50.00", most_likely_binary},
      {"most-likely conjunction CA pattern", most_likely_conjunction},
      {"ideal-model column", ideal_model},
      {"metric identities", metric_identities},
      {"IC undefined semantics", ic_undefined},
      {"banned-type exclusion", banned_exclusion},
      {"correlation machinery", correlation},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
