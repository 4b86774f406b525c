#include "qdag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "qdag/parallel.hpp"

namespace qdag {

void CheckCounts::add(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      ++passed;
      break;
    case Verdict::Fail:
      ++failed;
      break;
    case Verdict::NotApplicable:
      ++not_applicable;
      break;
  }
}

CheckCounts& CheckCounts::operator+=(const CheckCounts& o) {
  passed += o.passed;
  failed += o.failed;
  not_applicable += o.not_applicable;
  return *this;
}

void CompositionCounts::add(bool parent_correct, std::size_t wrong_children) {
  if (wrong_children == 0) {
    ca.add(parent_correct);
    return;
  }
  rwr.add(parent_correct);
  if (rwr_n.size() < wrong_children) rwr_n.resize(wrong_children);
  rwr_n[wrong_children - 1].add(parent_correct);
}

CompositionCounts& CompositionCounts::operator+=(const CompositionCounts& o) {
  ca += o.ca;
  rwr += o.rwr;
  if (rwr_n.size() < o.rwr_n.size()) rwr_n.resize(o.rwr_n.size());
  for (std::size_t i = 0; i < o.rwr_n.size(); ++i) rwr_n[i] += o.rwr_n[i];
  return *this;
}

void MetricCounters::merge(const MetricCounters& o) {
  for (const auto& [t, answers] : o.accuracy)
    for (const auto& [a, r] : answers) accuracy[t][a] += r;
  for (const auto& [t, c] : o.by_type) by_type[t] += c;
  for (const auto& [r, c] : o.by_rule) by_rule[r] += c;
  for (const auto& [t, rules] : o.checks)
    for (const auto& [id, c] : rules) checks[t][id] += c;
  dags.insert(dags.end(), o.dags.begin(), o.dags.end());
  missing_predictions += o.missing_predictions;
  max_children = std::max(max_children, o.max_children);
}

PredictionSet make_prediction_set(const std::vector<Prediction>& preds,
                                  const std::vector<QuestionRecord>& questions,
                                  std::vector<std::string>* unknown_ids) {
  std::unordered_map<std::string, AnswerKind> kinds;
  for (const auto& q : questions) kinds.emplace(q.id, answer_kind(*q.program));
  PredictionSet out;
  for (const auto& p : preds) {
    const auto it = kinds.find(p.id);
    if (it == kinds.end()) {
      if (unknown_ids) unknown_ids->push_back(p.id);
      continue;
    }
    out.insert_or_assign(p.id, parse_answer(p.answer, it->second));
  }
  return out;
}

MetricCounters evaluate_video(const std::vector<const QuestionRecord*>& questions,
                              const std::vector<const QuestionDag*>& dags,
                              const PredictionSet& pred, const BanList& bans) {
  MetricCounters c;
  std::unordered_map<std::string, const QuestionRecord*> gold;
  for (const auto* q : questions) gold.emplace(q->id, q);

  // Correctness of a scorable question; nullopt if gold or prediction is missing.
  auto correct = [&](const std::string& qid) -> std::optional<bool> {
    const auto g = gold.find(qid);
    if (g == gold.end() || !g->second->answer) return std::nullopt;
    const auto p = pred.find(qid);
    if (p == pred.end()) return std::nullopt;
    return p->second == *g->second->answer;
  };

  for (const auto* q : questions) {
    if (bans.banned(q->qtype) || !q->answer) continue;
    const auto p = pred.find(q->id);
    if (p == pred.end()) {
      ++c.missing_predictions;
      continue;
    }
    c.accuracy[q->qtype][q->answer->to_string()].add(p->second == *q->answer);
  }

  std::set<std::string> seen_parents;
  std::set<std::pair<std::string, std::string>> seen_checks;
  for (const auto* dag : dags) {
    for (const auto& n : dag->nodes) {
      if (n.args.empty() || !seen_parents.insert(n.question_id).second) continue;
      std::set<std::string> kids(n.args.begin(), n.args.end());
      if (bans.banned(n.qtype)) continue;
      if (std::any_of(kids.begin(), kids.end(),
                      [&](const std::string& k) { return bans.banned(dag->node(k).qtype); }))
        continue;
      const auto parent_ok = correct(n.question_id);
      if (!parent_ok) continue;
      std::size_t wrong = 0;
      bool complete = true;
      for (const auto& k : kids) {
        const auto ok = correct(dag->node(k).question_id);
        if (!ok) {
          complete = false;
          break;
        }
        if (!*ok) ++wrong;
      }
      if (!complete) continue;
      c.by_type[n.qtype].add(*parent_ok, wrong);
      c.by_rule[*composition_rule(*n.program)].add(*parent_ok, wrong);
      c.max_children = std::max<std::uint64_t>(c.max_children, kids.size());
    }

    DagPoint point{dag->video_id, dag->root().question_id, {}, {}};
    const auto lookup = lookup_in(*dag, pred);
    for (const auto& inst : evaluate_all(*dag, lookup, bans)) {
      point.checks.add(inst.verdict);
      const auto& parent = dag->node(inst.check.parent);
      if (seen_checks.emplace(inst.check.rule_id, parent.question_id).second)
        c.checks[parent.qtype][inst.check.rule_id].add(inst.verdict);
    }
    for (const auto& n : dag->nodes) {
      if (bans.banned(n.qtype)) continue;
      if (const auto ok = correct(n.question_id)) point.accuracy.add(*ok);
    }
    c.dags.push_back(std::move(point));
  }
  return c;
}

MetricCounters evaluate_corpus(const std::vector<QuestionRecord>& questions,
                               const std::vector<QuestionDag>& dags, const PredictionSet& pred,
                               const BanList& bans, unsigned workers) {
  struct Partition {
    std::vector<const QuestionRecord*> questions;
    std::vector<const QuestionDag*> dags;
  };
  std::map<std::string, Partition> by_video;
  for (const auto& q : questions) by_video[q.video_id].questions.push_back(&q);
  for (const auto& d : dags) by_video[d.video_id].dags.push_back(&d);
  std::vector<const Partition*> parts;
  for (const auto& [vid, p] : by_video) parts.push_back(&p);

  const auto partial = parallel_map(parts, workers, [&](const Partition* p) {
    return evaluate_video(p->questions, p->dags, pred, bans);
  });
  MetricCounters out;
  for (const auto& c : partial) out.merge(c);
  return out;
}

Cell Cell::of(const Ratio& r) {
  Cell c{std::nullopt, r.num, r.den};
  if (r.den > 0) c.value = 100.0 * static_cast<double>(r.num) / static_cast<double>(r.den);
  return c;
}

nlohmann::json Cell::to_json() const {
  return {{"value", value ? nlohmann::json(*value) : nlohmann::json(nullptr)},
          {"num", num},
          {"den", den}};
}

Cell normalized_accuracy(const std::map<std::string, Ratio>& per_answer) {
  Cell c;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [a, r] : per_answer) {
    c.num += r.num;
    c.den += r.den;
    if (r.den == 0) continue;
    sum += 100.0 * static_cast<double>(r.num) / static_cast<double>(r.den);
    ++n;
  }
  if (n > 0) c.value = sum / static_cast<double>(n);
  return c;
}

Cell macro_ic(const std::map<std::string, CheckCounts>& per_rule,
              const std::vector<std::string_view>& rule_ids) {
  Cell c;
  double sum = 0;
  bool all_defined = !rule_ids.empty();
  for (auto id : rule_ids) {
    const auto it = per_rule.find(std::string(id));
    const CheckCounts counts = it == per_rule.end() ? CheckCounts{} : it->second;
    c.num += counts.passed;
    c.den += counts.applicable();
    if (counts.applicable() == 0) {
      all_defined = false;
      continue;
    }
    sum += 100.0 * static_cast<double>(counts.passed) / static_cast<double>(counts.applicable());
  }
  if (all_defined) c.value = sum / static_cast<double>(rule_ids.size());
  return c;
}

std::vector<std::string_view> rules_for_type(QuestionType t) {
  switch (t) {
    case QuestionType::Interaction:
      return rules_for(CompositionRule::Interaction);
    case QuestionType::InteractionTemporalLoc:
    case QuestionType::ExistsTemporalLoc: {
      std::vector<std::string_view> out;
      for (auto r : {CompositionRule::After, CompositionRule::Before, CompositionRule::While,
                     CompositionRule::Between})
        for (auto id : rules_for(r)) out.push_back(id);
      return out;
    }
    case QuestionType::Conjunction: {
      auto out = rules_for(CompositionRule::And);
      for (auto id : rules_for(CompositionRule::Xor)) out.push_back(id);
      return out;
    }
    case QuestionType::Choose:
      return rules_for(CompositionRule::Choose);
    case QuestionType::Equals:
      return rules_for(CompositionRule::Equals);
    default:
      return {};
  }
}

std::optional<double> pearson(const std::vector<std::pair<double, double>>& points,
                              std::string* diagnostic) {
  auto fail = [&](const char* why) -> std::optional<double> {
    if (diagnostic) *diagnostic = why;
    return std::nullopt;
  };
  if (points.size() < 2) return fail("fewer than 2 points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0 || syy == 0) return fail("zero variance");
  if (diagnostic) diagnostic->clear();
  return sxy / std::sqrt(sxx * syy);
}

Correlation ic_accuracy_correlation(const std::vector<DagPoint>& dags) {
  Correlation c;
  for (const auto& d : dags) {
    if (d.checks.applicable() == 0 || d.accuracy.den == 0) continue;
    c.points.emplace_back(
        100.0 * static_cast<double>(d.checks.passed) / static_cast<double>(d.checks.applicable()),
        100.0 * static_cast<double>(d.accuracy.num) / static_cast<double>(d.accuracy.den));
    c.roots.push_back(d.root_question_id);
  }
  c.r = pearson(c.points, &c.diagnostic);
  return c;
}

namespace {

Cell delta(const Cell& rwr, const Cell& ca) {
  Cell d;
  if (rwr.defined() && ca.defined()) d.value = *rwr.value - *ca.value;
  return d;
}

void fill_compositions(MetricRow& row, const CompositionCounts& c, std::size_t n_max) {
  row.ca = Cell::of(c.ca);
  row.rwr = Cell::of(c.rwr);
  row.delta = delta(row.rwr, row.ca);
  for (std::size_t n = 0; n < n_max; ++n)
    row.rwr_n.push_back(Cell::of(n < c.rwr_n.size() ? c.rwr_n[n] : Ratio{}));
}

std::string rule_display_name(CompositionRule r) {
  switch (r) {
    case CompositionRule::LongerChoose:
      return "Longer Choose";
    case CompositionRule::ShorterChoose:
      return "Shorter Choose";
    default: {
      std::string s(to_string(r));
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      return s;
    }
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json row_json(const MetricRow& r, bool with_accuracy) {
  nlohmann::json j{{"key", r.key}, {"name", r.name}};
  if (with_accuracy) {
    j["accuracy"] = r.accuracy.to_json();
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [a, c] : r.accuracy_per_answer) per[a] = c.to_json();
    j["accuracy_per_answer"] = per;
    if (r.key == "overall") j["accuracy_macro_types"] = r.accuracy_macro.to_json();
  }
  j["ca"] = r.ca.to_json();
  j["rwr"] = r.rwr.to_json();
  j["delta"] = r.delta.to_json();
  nlohmann::json rn = nlohmann::json::array();
  for (const auto& c : r.rwr_n) rn.push_back(c.to_json());
  j["rwr_n"] = rn;
  j["ic"] = r.ic.to_json();
  return j;
}

}  // namespace

std::string format_cell(const Cell& c) {
  if (!c.defined()) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *c.value);
  return buf;
}

MetricReport build_report(const MetricCounters& c, const BanList& bans,
                          std::uint64_t unknown_prediction_ids) {
  MetricReport r;
  r.rwr_n_max = std::max<std::size_t>(1, c.max_children);
  r.missing_predictions = c.missing_predictions;
  r.unknown_prediction_ids = unknown_prediction_ids;
  for (auto t : bans.types()) r.banned_types.emplace_back(to_string(t));

  std::map<std::string, CheckCounts> per_rule;
  for (const auto& [t, rules] : c.checks)
    for (const auto& [id, counts] : rules) per_rule[id] += counts;

  std::map<std::string, Ratio> pooled;
  CompositionCounts all;
  double macro_sum = 0;
  std::size_t macro_n = 0;
  for (auto t : kAllQuestionTypes) {
    if (bans.banned(t)) continue;
    MetricRow row;
    row.key = to_string(t);
    row.name = display_name(t);
    static const std::map<std::string, Ratio> kNone;
    const auto acc = c.accuracy.find(t);
    const auto& answers = acc == c.accuracy.end() ? kNone : acc->second;
    row.accuracy = normalized_accuracy(answers);
    for (const auto& [a, ratio] : answers) {
      row.accuracy_per_answer[a] = Cell::of(ratio);
      pooled[a] += ratio;
    }
    if (row.accuracy.defined()) {
      macro_sum += *row.accuracy.value;
      ++macro_n;
    }
    const auto comp = c.by_type.find(t);
    const CompositionCounts counts = comp == c.by_type.end() ? CompositionCounts{} : comp->second;
    all += counts;
    fill_compositions(row, counts, r.rwr_n_max);
    static const std::map<std::string, CheckCounts> kNoChecks;
    const auto checks = c.checks.find(t);
    row.ic = macro_ic(checks == c.checks.end() ? kNoChecks : checks->second, rules_for_type(t));
    r.by_type.push_back(std::move(row));
  }

  std::vector<std::string_view> every_rule;
  for (const auto& rule : rule_catalog()) every_rule.push_back(rule.id);

  MetricRow overall;
  overall.key = "overall";
  overall.name = "Overall";
  overall.accuracy = normalized_accuracy(pooled);
  for (const auto& [a, ratio] : pooled) overall.accuracy_per_answer[a] = Cell::of(ratio);
  if (macro_n > 0) overall.accuracy_macro.value = macro_sum / static_cast<double>(macro_n);
  fill_compositions(overall, all, r.rwr_n_max);
  overall.ic = macro_ic(per_rule, every_rule);
  r.by_type.push_back(overall);

  CompositionCounts all_rules;
  for (auto rule : kAllCompositionRules) {
    MetricRow row;
    row.key = to_string(rule);
    row.name = rule_display_name(rule);
    const auto comp = c.by_rule.find(rule);
    const CompositionCounts counts = comp == c.by_rule.end() ? CompositionCounts{} : comp->second;
    all_rules += counts;
    fill_compositions(row, counts, r.rwr_n_max);
    row.ic = macro_ic(per_rule, rules_for(rule));
    r.by_rule.push_back(std::move(row));
  }
  MetricRow rule_overall;
  rule_overall.key = "overall";
  rule_overall.name = "Overall";
  fill_compositions(rule_overall, all_rules, r.rwr_n_max);
  rule_overall.ic = overall.ic;
  r.by_rule.push_back(std::move(rule_overall));

  for (const auto& rule : rule_catalog()) {
    const auto it = per_rule.find(std::string(rule.id));
    const CheckCounts counts = it == per_rule.end() ? CheckCounts{} : it->second;
    r.ic_rules.push_back({std::string(rule.id), counts, Cell::of({counts.passed, counts.applicable()})});
  }

  r.correlation = ic_accuracy_correlation(c.dags);
  return r;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["header"] = {
      {"accuracy", "mean over ground-truth answers of per-answer accuracy; the overall row "
                   "pools all in-scope questions per answer, accuracy_macro_types averages "
                   "the defined per-type values"},
      {"ca_rwr", "compositions are unique (video, parent question) pairs with every node "
                 "answered in gold and predictions and no banned node; the overall rows pool "
                 "all compositions"},
      {"ic", "macro mean of per-rule pass rates over the group's rule set; undefined when "
             "any of those rules has no applicable check; overall uses every rule"},
      {"banned_types", banned_types},
  };
  nlohmann::json types = nlohmann::json::array();
  for (const auto& row : by_type) types.push_back(row_json(row, true));
  j["by_question_type"] = types;
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& row : by_rule) rules.push_back(row_json(row, false));
  j["by_composition_rule"] = rules;
  nlohmann::json ic = nlohmann::json::array();
  for (const auto& row : ic_rules)
    ic.push_back({{"rule_id", row.rule_id},
                  {"passed", row.counts.passed},
                  {"failed", row.counts.failed},
                  {"not_applicable", row.counts.not_applicable},
                  {"ic", row.ic.to_json()}});
  j["consistency_rules"] = ic;
  j["correlation"] = {{"points", correlation.points.size()},
                      {"r", correlation.r ? nlohmann::json(*correlation.r) : nlohmann::json(nullptr)},
                      {"diagnostic", correlation.diagnostic}};
  j["rwr_n_max"] = rwr_n_max;
  j["missing_predictions"] = missing_predictions;
  j["unknown_prediction_ids"] = unknown_prediction_ids;
  return j;
}

namespace {

std::string rows_csv(const std::vector<MetricRow>& rows, std::size_t n_max, bool with_accuracy,
                     const char* first_col) {
  std::ostringstream out;
  out << first_col;
  if (with_accuracy) out << ",accuracy";
  out << ",ca,rwr,delta";
  for (std::size_t n = 1; n <= n_max; ++n) out << ",rwr_" << n;
  out << ",ic\n";
  for (const auto& row : rows) {
    out << csv_escape(row.name);
    if (with_accuracy) out << ',' << format_cell(row.accuracy);
    out << ',' << format_cell(row.ca) << ',' << format_cell(row.rwr) << ','
        << format_cell(row.delta);
    for (const auto& c : row.rwr_n) out << ',' << format_cell(c);
    out << ',' << format_cell(row.ic) << '\n';
  }
  return out.str();
}

}  // namespace

std::string MetricReport::by_type_csv() const {
  return rows_csv(by_type, rwr_n_max, true, "question_type");
}

std::string MetricReport::by_rule_csv() const {
  return rows_csv(by_rule, rwr_n_max, false, "composition_rule");
}

std::string MetricReport::ic_rules_csv() const {
  std::ostringstream out;
  out << "rule_id,passed,failed,not_applicable,ic\n";
  for (const auto& row : ic_rules)
    out << row.rule_id << ',' << row.counts.passed << ',' << row.counts.failed << ','
        << row.counts.not_applicable << ',' << format_cell(row.ic) << '\n';
  return out.str();
}

std::string MetricReport::rwr_n_csv() const {
  std::ostringstream out;
  out << "question_type";
  for (std::size_t n = 1; n <= rwr_n_max; ++n) out << ",rwr_" << n << ",count_" << n;
  out << '\n';
  for (const auto& row : by_type) {
    out << csv_escape(row.name);
    for (const auto& c : row.rwr_n) out << ',' << format_cell(c) << ',' << c.den;
    out << '\n';
  }
  return out.str();
}

std::string MetricReport::scatter_csv() const {
  std::ostringstream out;
  out << "dag_root,ic,accuracy\n";
  char buf[64];
  for (std::size_t i = 0; i < correlation.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f", correlation.points[i].first,
                  correlation.points[i].second);
    out << csv_escape(correlation.roots[i]) << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace qdag
