// qdag: corpus generation, decomposition, answering, baselines and evaluation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "qdag/baselines.hpp"
#include "qdag/corpus.hpp"
#include "qdag/io.hpp"
#include "qdag/metrics.hpp"
#include "qdag/parser.hpp"

namespace fs = std::filesystem;
using namespace qdag;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kIo = 3, kSchema = 4, kIdMismatch = 5 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IdMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string vocab_path;
  std::string templates_path;
  unsigned workers = 0;

  Vocabulary vocab() const {
    std::string path = vocab_path;
    if (path.empty())
      if (const char* env = std::getenv("QDAG_VOCAB")) path = env;
    if (path.empty()) return default_vocabulary();
    try {
      return Vocabulary::load(path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("vocabulary: ") + e.what());
    }
  }

  TemplateTable templates() const {
    std::string path = templates_path;
    if (path.empty())
      if (const char* env = std::getenv("QDAG_TEMPLATES")) path = env;
    if (path.empty()) return default_templates();
    try {
      return TemplateTable::load(path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("templates: ") + e.what());
    }
  }
};

void add_common(CLI::App* cmd, Common& c, bool vocab, bool templates, bool workers) {
  if (vocab) cmd->add_option("--vocab", c.vocab_path, "Vocabulary JSON (env QDAG_VOCAB)");
  if (templates)
    cmd->add_option("--templates", c.templates_path, "Template table JSON (env QDAG_TEMPLATES)");
  if (workers) cmd->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

// ---- gen ---------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  GeneratorParams params;
  SamplerConfig sampler;
  std::string out;
};

int cmd_gen(const GenArgs& a, const Common& c) {
  if (a.params.num_videos < 1) throw ConfigError("--videos must be at least 1");
  if (a.params.frames < 1) throw ConfigError("--frames must be at least 1");
  if (a.params.density < 0) throw ConfigError("--density must be non-negative");
  if (a.sampler.questions_per_video < 1) throw ConfigError("--questions-per-video must be at least 1");
  const auto vocab = c.vocab();
  const auto templates = c.templates();
  ensure_dir(a.out);

  const auto graphs = generate_scene_graphs(a.seed, a.params, vocab);
  const auto corpus = build_corpus(graphs, a.seed, a.sampler, vocab, templates, c.workers);

  JsonlWriter sg(fs::path(a.out) / "scene_graphs.jsonl");
  JsonlWriter qs(fs::path(a.out) / "questions.jsonl");
  JsonlWriter ds(fs::path(a.out) / "dags.jsonl");
  JsonlWriter ng(fs::path(a.out) / "negatives.jsonl");
  std::size_t n_dags = 0, n_nodes = 0, n_questions = 0, n_answered = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    sg.write(graphs[i].to_json());
    for (const auto& q : corpus[i].questions) {
      qs.write(q.to_json());
      ++n_questions;
      if (q.answer) ++n_answered;
    }
    for (const auto& d : corpus[i].dags) {
      ds.write(d.to_json());
      ++n_dags;
      n_nodes += d.nodes.size();
    }
    ng.write(corpus[i].negatives.to_json());
  }
  sg.close();
  qs.close();
  ds.close();
  ng.close();
  std::fprintf(stderr,
               "videos=%zu dags=%zu questions=%zu mean_sub_questions=%.2f answered=%.2f%%\n",
               graphs.size(), n_dags, n_questions,
               n_dags ? static_cast<double>(n_nodes - n_dags) / static_cast<double>(n_dags) : 0.0,
               n_questions ? 100.0 * static_cast<double>(n_answered) / static_cast<double>(n_questions)
                           : 0.0);
  return kOk;
}

// ---- decompose ---------------------------------------------------------

struct DecomposeArgs {
  std::string programs, out_dags, out_questions;
};

int cmd_decompose(const DecomposeArgs& a, const Common& c) {
  require_file(a.programs, "programs file");
  const auto vocab = c.vocab();
  const auto templates = c.templates();
  std::map<std::string, QuestionIndex> indexes;
  std::vector<QuestionRecord> records;
  std::vector<QuestionDag> dags;
  for_each_jsonl(a.programs, [&](const nlohmann::json& j) {
    const auto vid = j.at("video_id").get<std::string>();
    auto p = parse_program(j.at("program").get<std::string>(), vocab);
    auto dag = decompose(p, vid, templates);
    auto& index = indexes.try_emplace(vid, vid).first->second;
    if (index.find(dag.root().key)) return;  // duplicate root question
    index.add(dag, records);
    dags.push_back(std::move(dag));
  });
  JsonlWriter ds(a.out_dags);
  for (const auto& d : dags) ds.write(d.to_json());
  ds.close();
  JsonlWriter qs(a.out_questions);
  for (const auto& q : records) qs.write(q.to_json());
  qs.close();
  std::fprintf(stderr, "dags=%zu questions=%zu\n", dags.size(), records.size());
  return kOk;
}

// ---- shared loading ----------------------------------------------------

void check_ids(const std::vector<QuestionDag>& dags, const std::vector<QuestionRecord>& questions) {
  std::set<std::string> ids;
  for (const auto& q : questions) ids.insert(q.id);
  for (const auto& d : dags)
    for (const auto& n : d.nodes)
      if (!ids.contains(n.question_id))
        throw IdMismatch("DAG " + d.video_id + "/" + d.root_id() + " node " + n.id +
                         " refers to unknown question id '" + n.question_id + "'");
}

// ---- answer ------------------------------------------------------------

struct AnswerArgs {
  std::string scene_graphs, questions, dags, negatives, out_questions, out_dags;
};

int cmd_answer(const AnswerArgs& a, const Common& c) {
  require_file(a.scene_graphs, "scene graphs");
  require_file(a.questions, "questions");
  require_file(a.dags, "dags");
  if (!a.negatives.empty()) {
    require_file(a.negatives, "negatives");
    if (a.out_dags.empty()) throw ConfigError("--negatives needs --out-dags for the new DAGs");
  }
  const auto vocab = c.vocab();
  const auto templates = c.templates();
  const auto graphs = read_scene_graphs(a.scene_graphs);
  auto questions = read_questions(a.questions);
  auto dags = read_dags(a.dags);
  check_ids(dags, questions);
  std::vector<NegativeAnnotation> negs;
  if (!a.negatives.empty()) negs = read_negatives(a.negatives);

  std::map<std::string, std::size_t> graph_of;
  for (std::size_t i = 0; i < graphs.size(); ++i) graph_of.emplace(graphs[i].video_id, i);
  std::map<std::string, std::vector<QuestionRecord>> q_by_video;
  std::map<std::string, std::vector<QuestionDag>> d_by_video;
  std::vector<std::string> order;
  for (auto& q : questions) {
    if (!graph_of.contains(q.video_id))
      throw IdMismatch("question " + q.id + " refers to unknown video " + q.video_id);
    if (!q_by_video.contains(q.video_id)) order.push_back(q.video_id);
    if (q.provenance != Provenance::Annotated) {
      q.answer.reset();
      q.provenance = Provenance::Unknown;
    }
    q_by_video[q.video_id].push_back(std::move(q));
  }
  for (auto& d : dags) d_by_video[d.video_id].push_back(std::move(d));

  for (const auto& n : negs) {
    const auto g = graph_of.find(n.video_id);
    if (g == graph_of.end()) throw IdMismatch("negatives refer to unknown video " + n.video_id);
    auto& recs = q_by_video[n.video_id];
    if (recs.empty()) order.push_back(n.video_id);
    QuestionIndex index(n.video_id);
    for (const auto& r : recs) index.adopt(canonical_key(*r.program), r.id);
    for (const auto& neg : apply_negative_annotations(n, graphs[g->second], vocab, templates)) {
      if (index.find(canonical_key(*neg.program))) continue;
      auto dag = decompose(neg.program, n.video_id, templates);
      const std::size_t before = recs.size();
      index.add(dag, recs);
      for (std::size_t i = before; i < recs.size(); ++i)
        if (recs[i].id == dag.root().question_id) {
          recs[i].answer = neg.answer;
          recs[i].provenance = Provenance::Annotated;
        }
      d_by_video[n.video_id].push_back(std::move(dag));
    }
  }

  JsonlWriter qs(a.out_questions);
  std::unique_ptr<JsonlWriter> ds;
  if (!a.out_dags.empty()) ds = std::make_unique<JsonlWriter>(a.out_dags);
  for (const auto& vid : order) {
    auto& recs = q_by_video[vid];
    attach_gold(recs, d_by_video[vid], graphs[graph_of.at(vid)]);
    for (const auto& r : recs) qs.write(r.to_json());
  }
  if (ds) {
    for (const auto& vid : order)
      for (const auto& d : d_by_video[vid]) ds->write(d.to_json());
    ds->close();
  }
  qs.close();
  return kOk;
}

// ---- baselines ---------------------------------------------------------

struct BaselineArgs {
  std::string kind = "most-likely";
  std::string questions, train, scene_graphs, answer = "no", out;
  std::uint64_t seed = 0;
};

Predictor make_predictor(const BaselineArgs& a, const std::vector<QuestionRecord>& questions,
                         const Common& c) {
  if (a.kind == "oracle") {
    if (a.scene_graphs.empty()) throw ConfigError("oracle baseline needs --scene-graphs");
    require_file(a.scene_graphs, "scene graphs");
    return Predictor::oracle(read_scene_graphs(a.scene_graphs));
  }
  if (a.kind == "most-likely") {
    if (a.train.empty()) return Predictor::most_likely(questions);
    require_file(a.train, "training questions");
    return Predictor::most_likely(read_questions(a.train));
  }
  if (a.kind == "constant") return Predictor::constant(a.answer);
  if (a.kind == "random") return Predictor::random(a.seed, c.vocab());
  throw ConfigError("unknown baseline '" + a.kind + "'");
}

void add_baseline_options(CLI::App* cmd, BaselineArgs& b) {
  cmd->add_option("--train", b.train, "Gold questions to fit most-likely on (default: --questions)");
  cmd->add_option("--scene-graphs", b.scene_graphs, "Scene graphs for the oracle");
  cmd->add_option("--answer", b.answer, "Answer for the constant baseline");
  cmd->add_option("--seed", b.seed, "Seed for the random baseline");
}

int cmd_baseline(const BaselineArgs& a, const Common& c) {
  require_file(a.questions, "questions");
  const auto questions = read_questions(a.questions);
  const auto predictor = make_predictor(a, questions, c);
  for (auto t : predictor.unfit_types())
    if (predictor.kind() == Predictor::Kind::MostLikely)
      std::fprintf(stderr, "warning: no training answers for %s; predicting the default\n",
                   std::string(to_string(t)).c_str());
  JsonlWriter out(a.out);
  for (const auto& p : predictor.predict_all(questions)) out.write(p.to_json());
  out.close();
  return kOk;
}

// ---- evaluate / correlate ----------------------------------------------

struct EvalArgs {
  std::string dags, questions, predictions, out_dir, out, ban_list = "objectsQuery,actionTemporalLoc";
  std::string baseline;
  BaselineArgs base;
  std::vector<std::string> formats{"json", "csv"};
};

struct Evaluation {
  MetricReport report;
};

Evaluation run_evaluation(const EvalArgs& a, const Common& c) {
  BanList bans;
  try {
    bans = a.ban_list == "none" ? BanList(std::set<QuestionType>{}) : BanList::parse(a.ban_list);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--ban-list: ") + e.what());
  }
  for (const auto& f : a.formats)
    if (f != "json" && f != "csv") throw ConfigError("unknown report format '" + f + "'");
  if (a.predictions.empty() == a.baseline.empty())
    throw ConfigError("give exactly one of --predictions and --baseline");
  require_file(a.dags, "dags");
  require_file(a.questions, "questions");
  if (!a.predictions.empty()) require_file(a.predictions, "predictions");

  const auto questions = read_questions(a.questions);
  const auto dags = read_dags(a.dags);
  check_ids(dags, questions);

  std::vector<Prediction> preds;
  if (!a.predictions.empty()) {
    preds = read_predictions(a.predictions);
  } else {
    BaselineArgs b = a.base;
    b.kind = a.baseline;
    preds = make_predictor(b, questions, c).predict_all(questions);
  }
  std::vector<std::string> unknown;
  const auto pred = make_prediction_set(preds, questions, &unknown);
  if (!unknown.empty())
    std::fprintf(stderr, "warning: %zu prediction ids match no question and were ignored (first: %s)\n",
                 unknown.size(), unknown.front().c_str());
  const auto counters = evaluate_corpus(questions, dags, pred, bans, c.workers);
  return {build_report(counters, bans, unknown.size())};
}

void add_eval_options(CLI::App* cmd, EvalArgs& e) {
  cmd->add_option("--dags", e.dags, "DAG JSONL")->required();
  cmd->add_option("--questions", e.questions, "Gold questions JSONL")->required();
  cmd->add_option("--predictions", e.predictions, "Predictions JSONL");
  cmd->add_option("--baseline", e.baseline, "Score a baseline instead: oracle|most-likely|constant|random");
  cmd->add_option("--ban-list", e.ban_list, "Comma-separated banned question types, or 'none'");
  add_baseline_options(cmd, e.base);
}

int cmd_evaluate(const EvalArgs& a, const Common& c) {
  const auto ev = run_evaluation(a, c);
  ensure_dir(a.out_dir);
  const fs::path dir(a.out_dir);
  for (const auto& f : a.formats) {
    if (f == "json") write_text(dir / "report.json", ev.report.to_json().dump(2) + "\n");
    if (f == "csv") {
      write_text(dir / "by_question_type.csv", ev.report.by_type_csv());
      write_text(dir / "by_composition_rule.csv", ev.report.by_rule_csv());
      write_text(dir / "consistency_rules.csv", ev.report.ic_rules_csv());
      write_text(dir / "rwr_n.csv", ev.report.rwr_n_csv());
    }
  }
  std::cout << ev.report.by_type_csv();
  return kOk;
}

int cmd_correlate(const EvalArgs& a, const Common& c) {
  const auto ev = run_evaluation(a, c);
  const auto& corr = ev.report.correlation;
  if (!a.out.empty()) write_text(a.out, ev.report.scatter_csv());
  if (corr.r)
    std::printf("r = %.6f over %zu DAGs\n", *corr.r, corr.points.size());
  else
    std::printf("r undefined: %s (%zu DAGs)\n", corr.diagnostic.c_str(), corr.points.size());
  return kOk;
}

// ---- audit -------------------------------------------------------------

struct AuditArgs {
  std::string dags, questions, dump;
};

int cmd_audit(const AuditArgs& a, const Common&) {
  require_file(a.dags, "dags");
  require_file(a.questions, "questions");
  const auto questions = read_questions(a.questions);
  const auto dags = read_dags(a.dags);
  check_ids(dags, questions);
  std::unordered_map<std::string, const QuestionRecord*> by_id;
  for (const auto& q : questions) by_id.emplace(q.id, &q);

  std::unique_ptr<JsonlWriter> dump;
  if (!a.dump.empty()) dump = std::make_unique<JsonlWriter>(a.dump);
  std::size_t violations = 0, checked = 0;
  for (const auto& d : dags) {
    AnswerMap gold;
    for (const auto& n : d.nodes) {
      const auto* q = by_id.at(n.question_id);
      if (q->answer) gold.emplace(n.id, AnswerEntry{*q->answer, q->provenance});
    }
    for (const auto& v : audit_gold(d, gold)) {
      ++violations;
      if (dump) dump->write(violation_json(d, v));
    }
    ++checked;
  }
  if (dump) dump->close();
  std::printf("audited %zu DAGs: %zu violations\n", checked, violations);
  return violations == 0 ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Question-decomposition DAGs and compositional consistency metrics"};
  app.require_subcommand(1);
  Common common;

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate scene graphs, questions, DAGs and negatives");
  g->add_option("--seed", gen.seed, "Random seed")->required();
  g->add_option("--videos", gen.params.num_videos, "Number of videos");
  g->add_option("--frames", gen.params.frames, "Frames per video");
  g->add_option("--density", gen.params.density, "Relationship density");
  g->add_option("--questions-per-video", gen.sampler.questions_per_video, "Root questions per video");
  g->add_option("--negatives-per-video", gen.sampler.negatives_per_video,
                "Absent objects annotated per video");
  g->add_option("--out", gen.out, "Output directory")->required();
  add_common(g, common, true, true, true);

  DecomposeArgs dec;
  auto* d = app.add_subcommand("decompose", "Decompose programs into question DAGs");
  d->add_option("--programs", dec.programs, "JSONL of {video_id, program}")->required();
  d->add_option("--out-dags", dec.out_dags, "Output DAG JSONL")->required();
  d->add_option("--out-questions", dec.out_questions, "Output questions JSONL")->required();
  add_common(d, common, true, true, false);

  AnswerArgs ans;
  auto* an = app.add_subcommand("answer", "Attach gold answers by execution and propagation");
  an->add_option("--scene-graphs", ans.scene_graphs, "Scene graph JSONL")->required();
  an->add_option("--questions", ans.questions, "Questions JSONL")->required();
  an->add_option("--dags", ans.dags, "DAG JSONL")->required();
  an->add_option("--negatives", ans.negatives, "Negative annotation JSONL");
  an->add_option("--out-questions", ans.out_questions, "Output questions JSONL")->required();
  an->add_option("--out-dags", ans.out_dags, "Output DAG JSONL (with negatives' DAGs)");
  add_common(an, common, true, true, false);

  BaselineArgs base;
  auto* b = app.add_subcommand("baseline", "Write predictions of a reference predictor");
  b->add_option("--kind", base.kind, "oracle|most-likely|constant|random")->required();
  b->add_option("--questions", base.questions, "Questions to predict")->required();
  b->add_option("--out", base.out, "Output predictions JSONL")->required();
  add_baseline_options(b, base);
  add_common(b, common, true, false, false);

  EvalArgs ev;
  auto* e = app.add_subcommand("evaluate", "Compute the metric report");
  add_eval_options(e, ev);
  e->add_option("--out-dir", ev.out_dir, "Report directory")->required();
  e->add_option("--formats", ev.formats, "Report formats: json,csv")->delimiter(',');
  add_common(e, common, true, false, true);

  EvalArgs corr;
  auto* c = app.add_subcommand("correlate", "Per-DAG IC vs accuracy and Pearson r");
  add_eval_options(c, corr);
  c->add_option("--out", corr.out, "Scatter CSV");
  add_common(c, common, true, false, true);

  AuditArgs aud;
  auto* au = app.add_subcommand("audit", "Check gold answers against the consistency rules");
  au->add_option("--dags", aud.dags, "DAG JSONL")->required();
  au->add_option("--questions", aud.questions, "Gold questions JSONL")->required();
  au->add_option("--dump", aud.dump, "Violation dump JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, common);
    if (d->parsed()) return cmd_decompose(dec, common);
    if (an->parsed()) return cmd_answer(ans, common);
    if (b->parsed()) return cmd_baseline(base, common);
    if (e->parsed()) return cmd_evaluate(ev, common);
    if (c->parsed()) return cmd_correlate(corr, common);
    if (au->parsed()) return cmd_audit(aud, common);
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kConfig;
  } catch (const TemplateError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kConfig;
  } catch (const IoError& err) {
    std::fprintf(stderr, "i/o error: %s\n", err.what());
    return kIo;
  } catch (const SchemaError& err) {
    std::fprintf(stderr, "schema error: %s\n", err.what());
    return kSchema;
  } catch (const ParseError& err) {
    std::fprintf(stderr, "schema error: %s\n", err.what());
    return kSchema;
  } catch (const IdMismatch& err) {
    std::fprintf(stderr, "id mismatch: %s\n", err.what());
    return kIdMismatch;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kFailed;
  }
  return kOk;
}
