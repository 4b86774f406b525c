#pragma once

#include <map>
#include <string>
#include <vector>

#include "qdag/corpus.hpp"
#include "qdag/parser.hpp"
#include "qdag/scene_graph.hpp"

namespace qdag::testing {

// v1, 10 frames; walking through the doorway [1,4], smiling at something
// [6,9]; person touching dish {2,3}, touching phone {7,8}, holding bottle {5..8}.
inline SceneGraph sg1() {
  SceneGraph g;
  g.video_id = "v1";
  g.num_frames = 10;
  g.actions = {{"smiling at something", 6, 9}, {"walking through the doorway", 1, 4}};
  g.relationships = {{"person", "holding", "bottle", {5, 6, 7, 8}},
                     {"person", "touching", "dish", {2, 3}},
                     {"person", "touching", "phone", {7, 8}}};
  g.validate();
  return g;
}

inline ProgramPtr P(const std::string& text) { return parse_program(text); }

struct Corpus {
  std::vector<SceneGraph> graphs;
  std::vector<QuestionRecord> questions;
  std::vector<QuestionDag> dags;
};

inline Corpus flatten(std::vector<SceneGraph> graphs, const std::vector<VideoCorpus>& parts) {
  Corpus c{std::move(graphs), {}, {}};
  for (const auto& p : parts) {
    c.questions.insert(c.questions.end(), p.questions.begin(), p.questions.end());
    c.dags.insert(c.dags.end(), p.dags.begin(), p.dags.end());
  }
  return c;
}

inline Corpus make_corpus(std::uint64_t seed, int videos, int per_video = 24,
                          unsigned workers = 1) {
  GeneratorParams params;
  params.num_videos = videos;
  SamplerConfig cfg;
  cfg.questions_per_video = per_video;
  auto graphs = generate_scene_graphs(seed, params, default_vocabulary());
  auto parts = build_corpus(graphs, seed, cfg, default_vocabulary(), default_templates(), workers);
  return flatten(std::move(graphs), parts);
}

/// Gold answers as a prediction set.
inline PredictionSet gold_predictions(const std::vector<QuestionRecord>& qs) {
  PredictionSet p;
  for (const auto& q : qs)
    if (q.answer) p.emplace(q.id, *q.answer);
  return p;
}

/// Registers hand-written root programs for one video, attaching oracle answers.
inline Corpus corpus_from_programs(const SceneGraph& g, const std::vector<std::string>& programs) {
  Corpus c;
  c.graphs = {g};
  QuestionIndex index(g.video_id);
  for (const auto& text : programs) {
    auto dag = decompose(P(text), g.video_id);
    index.add(dag, c.questions);
    c.dags.push_back(std::move(dag));
  }
  attach_gold(c.questions, c.dags, g);
  return c;
}

}  // namespace qdag::testing
