#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdag/vocabulary.hpp"

namespace qdag {

/// Subject-relation-object tuple with the frames it is annotated in.
struct Relationship {
  std::string subject = "person";
  std::string relation;
  std::string object;
  std::vector<int> frames;  // sorted, unique, non-empty
};

struct ActionInterval {
  std::string label;
  int start = 1;
  int end = 1;

  int duration() const { return end - start + 1; }
};

/// Contiguous frame range [lo, hi]; empty when lo > hi.
struct FrameWindow {
  int lo = 1;
  int hi = 0;

  static FrameWindow whole(int num_frames) { return {1, num_frames}; }
  static FrameWindow none() { return {1, 0}; }

  bool empty() const { return lo > hi; }
  bool contains(int f) const { return f >= lo && f <= hi; }
  std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
  FrameWindow intersect(const FrameWindow& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
  std::vector<int> frames() const;

  friend bool operator==(const FrameWindow&, const FrameWindow&) = default;
};

/// One video's spatio-temporal annotations. Immutable after loading.
struct SceneGraph {
  std::string video_id;
  int num_frames = 1;
  std::vector<Relationship> relationships;
  std::vector<ActionInterval> actions;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  const ActionInterval* find_action(const std::string& label) const;
  /// Objects appearing in any tuple, as subject or object.
  std::set<std::string> present_objects() const;

  nlohmann::json to_json() const;
  static SceneGraph from_json(const nlohmann::json& j);
};

/// Objects people nearly always have in view; never offered as absent.
const std::set<std::string>& always_present_objects();

/// Vocabulary objects that do not occur in `g`, minus the always-present set.
std::set<std::string> absent_objects(const SceneGraph& g, const std::set<std::string>& vocab);

struct GeneratorParams {
  int num_videos = 10;
  int frames = 24;
  /// Relationship tuples per four frames; 0 yields empty relationship lists.
  double density = 1.0;
  int min_actions = 2;
  int max_actions = 4;
};

/// Deterministic synthetic corpus: same seed and params give identical output.
std::vector<SceneGraph> generate_scene_graphs(std::uint64_t seed, const GeneratorParams& params,
                                              const Vocabulary& vocab);

/// Single video from the same stream as generate_scene_graphs (index i).
SceneGraph generate_scene_graph(std::uint64_t seed, int index, const GeneratorParams& params,
                                const Vocabulary& vocab);

}  // namespace qdag
