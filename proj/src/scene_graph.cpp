#include "qdag/scene_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "qdag/random.hpp"

namespace qdag {

std::vector<int> FrameWindow::frames() const {
  std::vector<int> out;
  for (int f = lo; f <= hi; ++f) out.push_back(f);
  return out;
}

void SceneGraph::validate() const {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("scene graph " + video_id + ": " + msg);
  };
  if (video_id.empty()) fail("empty video_id");
  if (num_frames < 1) fail("num_frames must be positive");
  for (const auto& r : relationships) {
    if (r.frames.empty()) fail("relationship with no frames");
    if (r.relation.empty() || r.object.empty() || r.subject.empty()) fail("empty label");
    for (std::size_t i = 0; i < r.frames.size(); ++i) {
      if (r.frames[i] < 1 || r.frames[i] > num_frames) fail("frame index out of range");
      if (i > 0 && r.frames[i] <= r.frames[i - 1]) fail("frames not sorted and unique");
    }
  }
  std::set<std::string> seen;
  for (const auto& a : actions) {
    if (a.start < 1 || a.end > num_frames) fail("action '" + a.label + "' out of range");
    if (a.start > a.end) fail("action '" + a.label + "' has start > end");
    if (!seen.insert(a.label).second) fail("duplicate action label '" + a.label + "'");
  }
}

const ActionInterval* SceneGraph::find_action(const std::string& label) const {
  for (const auto& a : actions)
    if (a.label == label) return &a;
  return nullptr;
}

std::set<std::string> SceneGraph::present_objects() const {
  std::set<std::string> out;
  for (const auto& r : relationships) {
    out.insert(r.subject);
    out.insert(r.object);
  }
  return out;
}

nlohmann::json SceneGraph::to_json() const {
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : relationships)
    rels.push_back({{"subject", r.subject},
                    {"relation", r.relation},
                    {"object", r.object},
                    {"frames", r.frames}});
  nlohmann::json acts = nlohmann::json::array();
  for (const auto& a : actions)
    acts.push_back({{"label", a.label}, {"start", a.start}, {"end", a.end}});
  return {{"video_id", video_id},
          {"num_frames", num_frames},
          {"relationships", std::move(rels)},
          {"actions", std::move(acts)}};
}

SceneGraph SceneGraph::from_json(const nlohmann::json& j) {
  SceneGraph g;
  g.video_id = j.at("video_id").get<std::string>();
  g.num_frames = j.at("num_frames").get<int>();
  for (const auto& r : j.at("relationships")) {
    Relationship rel;
    rel.subject = canonical_label(r.value("subject", std::string("person")));
    rel.relation = canonical_label(r.at("relation").get<std::string>());
    rel.object = canonical_label(r.at("object").get<std::string>());
    rel.frames = r.at("frames").get<std::vector<int>>();
    std::sort(rel.frames.begin(), rel.frames.end());
    rel.frames.erase(std::unique(rel.frames.begin(), rel.frames.end()), rel.frames.end());
    g.relationships.push_back(std::move(rel));
  }
  for (const auto& a : j.at("actions"))
    g.actions.push_back({canonical_label(a.at("label").get<std::string>()), a.at("start").get<int>(),
                         a.at("end").get<int>()});
  g.validate();
  return g;
}

const std::set<std::string>& always_present_objects() {
  static const std::set<std::string> objs{"person", "clothes", "floor", "hands", "hair"};
  return objs;
}

std::set<std::string> absent_objects(const SceneGraph& g, const std::set<std::string>& vocab) {
  const auto present = g.present_objects();
  const auto& always = always_present_objects();
  std::set<std::string> out;
  for (const auto& o : vocab)
    if (!present.contains(o) && !always.contains(o)) out.insert(o);
  return out;
}

SceneGraph generate_scene_graph(std::uint64_t seed, int index, const GeneratorParams& params,
                                const Vocabulary& vocab) {
  if (params.frames < 1 || params.density < 0 || params.min_actions < 0 ||
      params.max_actions < params.min_actions)
    throw std::invalid_argument("invalid generator parameters");
  Rng rng(seed, static_cast<std::uint64_t>(index));

  SceneGraph g;
  char id[32];
  std::snprintf(id, sizeof id, "vid%05d", index);
  g.video_id = id;
  g.num_frames = params.frames;
  const int n = params.frames;

  std::vector<std::string> actions(vocab.actions.begin(), vocab.actions.end());
  const int want_actions = std::min<int>(static_cast<int>(actions.size()),
                                         rng.uniform_int(params.min_actions, params.max_actions));
  rng.shuffle(actions);
  for (int i = 0; i < want_actions; ++i) {
    const int len = rng.uniform_int(1, std::max(1, n / 3));
    const int start = rng.uniform_int(1, n);
    g.actions.push_back({actions[static_cast<std::size_t>(i)], start, std::min(n, start + len - 1)});
  }
  std::sort(g.actions.begin(), g.actions.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });

  std::vector<std::string> objects;
  for (const auto& o : vocab.objects)
    if (o != "person") objects.push_back(o);
  std::vector<std::string> relations(vocab.relations.begin(), vocab.relations.end());

  const int tuples = static_cast<int>(std::lround(params.density * n / 4.0));
  std::map<std::pair<std::string, std::string>, std::set<int>> merged;
  if (!objects.empty() && !relations.empty()) {
    for (int t = 0; t < tuples; ++t) {
      const auto& rel = relations[rng.index(relations.size())];
      const auto& obj = objects[rng.index(objects.size())];
      const int len = rng.uniform_int(1, std::max(1, n / 4));
      const int start = rng.uniform_int(1, n);
      auto& frames = merged[{rel, obj}];
      for (int f = start; f <= std::min(n, start + len - 1); ++f) frames.insert(f);
    }
  }
  for (auto& [key, frames] : merged)
    g.relationships.push_back(
        {"person", key.first, key.second, std::vector<int>(frames.begin(), frames.end())});
  return g;
}

std::vector<SceneGraph> generate_scene_graphs(std::uint64_t seed, const GeneratorParams& params,
                                              const Vocabulary& vocab) {
  if (params.num_videos < 1) throw std::invalid_argument("num_videos must be positive");
  std::vector<SceneGraph> out;
  out.reserve(static_cast<std::size_t>(params.num_videos));
  for (int i = 0; i < params.num_videos; ++i)
    out.push_back(generate_scene_graph(seed, i, params, vocab));
  return out;
}

}  // namespace qdag
