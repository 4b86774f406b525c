#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdag/consistency.hpp"
#include "qdag/decomposer.hpp"
#include "qdag/records.hpp"

namespace qdag {

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  void add(bool hit) {
    ++den;
    if (hit) ++num;
  }
  Ratio& operator+=(const Ratio& o) {
    num += o.num;
    den += o.den;
    return *this;
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct CheckCounts {
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::uint64_t not_applicable = 0;

  std::uint64_t applicable() const { return passed + failed; }
  void add(Verdict v);
  CheckCounts& operator+=(const CheckCounts& o);
  friend bool operator==(const CheckCounts&, const CheckCounts&) = default;
};

/// CA / RWR / RWR-n tallies for one group of compositions.
struct CompositionCounts {
  Ratio ca;                  // parent correct among all-children-correct compositions
  Ratio rwr;                 // parent correct among compositions with >= 1 wrong child
  std::vector<Ratio> rwr_n;  // [n-1]: exactly n wrong children

  void add(bool parent_correct, std::size_t wrong_children);
  CompositionCounts& operator+=(const CompositionCounts& o);
  friend bool operator==(const CompositionCounts&, const CompositionCounts&) = default;
};

/// Per-DAG tallies behind the IC-vs-accuracy scatter.
struct DagPoint {
  std::string video_id;
  std::string root_question_id;
  CheckCounts checks;
  Ratio accuracy;
  friend bool operator==(const DagPoint&, const DagPoint&) = default;
};

/// Integer state of an evaluation. Merging is associative; per-video
/// partial results can be combined in any grouping.
struct MetricCounters {
  /// qtype -> gold answer text -> correct/total.
  std::map<QuestionType, std::map<std::string, Ratio>> accuracy;
  std::map<QuestionType, CompositionCounts> by_type;
  std::map<CompositionRule, CompositionCounts> by_rule;
  /// parent qtype -> rule id -> verdict counts (deduplicated per parent question).
  std::map<QuestionType, std::map<std::string, CheckCounts>> checks;
  std::vector<DagPoint> dags;
  std::uint64_t missing_predictions = 0;
  std::uint64_t max_children = 0;

  void merge(const MetricCounters& o);
  friend bool operator==(const MetricCounters&, const MetricCounters&) = default;
};

/// Parses raw prediction text against each question's answer kind. Ids not
/// present in `questions` are skipped and returned in `unknown_ids`.
PredictionSet make_prediction_set(const std::vector<Prediction>& preds,
                                  const std::vector<QuestionRecord>& questions,
                                  std::vector<std::string>* unknown_ids = nullptr);

/// Counts for one video's questions and DAGs.
MetricCounters evaluate_video(const std::vector<const QuestionRecord*>& questions,
                              const std::vector<const QuestionDag*>& dags,
                              const PredictionSet& pred, const BanList& bans);

/// Partitions by video, evaluates partitions on `workers` threads and
/// merges them in video-id order.
MetricCounters evaluate_corpus(const std::vector<QuestionRecord>& questions,
                               const std::vector<QuestionDag>& dags, const PredictionSet& pred,
                               const BanList& bans, unsigned workers = 1);

/// A percentage (0..100) with the counts behind it. Undefined cells have no
/// value and render as "N/A".
struct Cell {
  std::optional<double> value;
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  static Cell of(const Ratio& r);
  bool defined() const { return value.has_value(); }
  nlohmann::json to_json() const;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Mean over ground-truth answers of per-answer accuracy.
Cell normalized_accuracy(const std::map<std::string, Ratio>& per_answer);

/// Unweighted mean of per-rule IC over `rule_ids`; undefined if the set is
/// empty or any rule has no applicable check.
Cell macro_ic(const std::map<std::string, CheckCounts>& per_rule,
              const std::vector<std::string_view>& rule_ids);

/// Static rule set scored for a question type.
std::vector<std::string_view> rules_for_type(QuestionType t);

struct Correlation {
  std::vector<std::pair<double, double>> points;  // (IC %, accuracy %)
  std::vector<std::string> roots;                  // root question id per point
  std::optional<double> r;
  std::string diagnostic;  // why r is undefined
};

std::optional<double> pearson(const std::vector<std::pair<double, double>>& points,
                              std::string* diagnostic = nullptr);

/// Pearson r over DAGs that have at least one applicable check and one
/// scored node.
Correlation ic_accuracy_correlation(const std::vector<DagPoint>& dags);

struct MetricRow {
  std::string key;   // "objectExists", "and", "overall"
  std::string name;  // display name
  Cell accuracy;
  Cell accuracy_macro;  // overall row only: mean over question types
  std::map<std::string, Cell> accuracy_per_answer;
  Cell ca, rwr, delta;
  std::vector<Cell> rwr_n;
  Cell ic;
};

struct RuleIcRow {
  std::string rule_id;
  CheckCounts counts;
  Cell ic;
};

struct MetricReport {
  std::vector<MetricRow> by_type;  // non-banned types, then Overall
  std::vector<MetricRow> by_rule;  // 13 composition rules, then Overall
  std::vector<RuleIcRow> ic_rules;
  Correlation correlation;
  std::size_t rwr_n_max = 1;
  std::vector<std::string> banned_types;
  std::uint64_t missing_predictions = 0;
  std::uint64_t unknown_prediction_ids = 0;

  nlohmann::json to_json() const;
  std::string by_type_csv() const;
  std::string by_rule_csv() const;
  std::string ic_rules_csv() const;
  std::string rwr_n_csv() const;
  std::string scatter_csv() const;
};

MetricReport build_report(const MetricCounters& c, const BanList& bans,
                          std::uint64_t unknown_prediction_ids = 0);

/// Percent with two decimals, or "N/A".
std::string format_cell(const Cell& c);

}  // namespace qdag
