#include "qdag/vocabulary.hpp"

#include <fstream>

namespace qdag {

namespace {

std::set<std::string> read_labels(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw std::runtime_error(std::string("vocabulary: missing array '") + key + "'");
  std::set<std::string> out;
  for (const auto& v : j.at(key)) {
    auto l = canonical_label(v.get<std::string>());
    if (l.empty() || l.find_first_of("(),") != std::string::npos)
      throw std::runtime_error(std::string("vocabulary: invalid label in '") + key + "'");
    out.insert(std::move(l));
  }
  return out;
}

}  // namespace

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  return Vocabulary{read_labels(j, "objects"), read_labels(j, "relations"),
                    read_labels(j, "actions")};
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file " + path.string());
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json Vocabulary::to_json() const {
  return nlohmann::json{{"objects", objects}, {"relations", relations}, {"actions", actions}};
}

const Vocabulary& default_vocabulary() {
  static const Vocabulary vocab{
      {"person", "clothes", "floor", "hands", "hair", "bag", "blanket", "book", "bottle", "box",
       "chair", "cup", "dish", "doorknob", "doorway", "food", "laptop", "mirror", "phone",
       "picture", "pillow", "shoe", "table", "towel", "window"},
      {"above", "behind", "carrying", "holding", "in front of", "leaning on", "looking at",
       "sitting on", "touching", "twisting"},
      {"drinking from a cup", "holding a dish", "looking in the mirror", "opening a window",
       "putting some clothes", "sitting on a chair", "smiling at something", "taking a picture",
       "walking through the doorway", "watching television"}};
  return vocab;
}

void validate_labels(const Program& p, const Vocabulary& vocab) {
  auto fail = [&](const std::string& kind, const std::string& l) {
    throw ProgramError("unknown " + kind + " label '" + l + "' in " +
                       std::string(function_name(p)));
  };
  switch (p.op()) {
    case Op::ObjExists:
      if (!vocab.has_object(p.label())) fail("object", p.label());
      break;
    case Op::RelationExists:
      if (!vocab.has_relation(p.label())) fail("relation", p.label());
      break;
    case Op::ActionExists:
    case Op::LongerThan:
    case Op::ShorterThan:
      for (const auto& l : p.labels())
        if (!vocab.has_action(l)) fail("action", l);
      break;
    default:
      break;
  }
  for (const auto& a : p.args()) validate_labels(*a, vocab);
}

}  // namespace qdag
