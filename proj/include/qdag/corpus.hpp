#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdag/decomposer.hpp"
#include "qdag/propagation.hpp"
#include "qdag/random.hpp"
#include "qdag/records.hpp"
#include "qdag/scene_graph.hpp"
#include "qdag/vocabulary.hpp"

namespace qdag {

/// Root-program families the sampler draws from.
enum class Family : std::uint8_t {
  ObjExists,
  RelationExists,
  Interaction,
  ActionExists,
  ExistsTemporalLoc,
  InteractionTemporalLoc,
  FirstLast,
  LongestShortest,
  Conjunction,
  Equals,
  Duration,
  OccursOrder,
  ChooseObject,
  ChooseTime,
  ChooseDuration,
  ObjectsQuery,
  ActionsQuery,
};

struct SamplerConfig {
  int questions_per_video = 24;
  /// Absent objects sampled into each video's negative annotation.
  int negatives_per_video = 2;
  /// Draws allowed per requested root before giving up on a video.
  int max_attempts = 40;
  /// Families to draw from uniformly; empty means all.
  std::vector<Family> families;
};

/// Draws one root program of the given family for `g`. Labels are biased
/// towards what `g` contains so answers are mixed. The result may still
/// have an undefined answer; callers resample.
ProgramPtr sample_program(Family f, Rng& rng, const SceneGraph& g, const Vocabulary& vocab);

/// Per-video question ids, assigned in order of first appearance.
class QuestionIndex {
 public:
  explicit QuestionIndex(std::string video_id) : video_id_(std::move(video_id)) {}

  /// Existing id for the program, or nullptr.
  const std::string* find(const std::string& key) const;
  /// Assigns ids to every node of `dag` and appends a record for each
  /// program not seen before. Returns true if the root was new.
  bool add(QuestionDag& dag, std::vector<QuestionRecord>& records);
  /// Registers an existing question; later ids never collide with it.
  void adopt(const std::string& key, const std::string& id);

 private:
  std::string video_id_;
  std::map<std::string, std::string> ids_;
  std::size_t next_ = 0;
};

/// Everything generated for one video.
struct VideoCorpus {
  std::vector<QuestionRecord> questions;
  std::vector<QuestionDag> dags;
  NegativeAnnotation negatives;
};

/// Fills record answers: executed by the oracle where defined, otherwise
/// propagated from each DAG's executed root where derivable.
void attach_gold(std::vector<QuestionRecord>& records, const std::vector<QuestionDag>& dags,
                 const SceneGraph& g);

VideoCorpus build_video_corpus(const SceneGraph& g, std::uint64_t seed, std::uint64_t stream,
                               const SamplerConfig& cfg, const Vocabulary& vocab,
                               const TemplateTable& templates = default_templates());

/// One VideoCorpus per scene graph, in input order; identical for any
/// worker count.
std::vector<VideoCorpus> build_corpus(const std::vector<SceneGraph>& graphs, std::uint64_t seed,
                                      const SamplerConfig& cfg, const Vocabulary& vocab,
                                      const TemplateTable& templates = default_templates(),
                                      unsigned workers = 1);

}  // namespace qdag
