#pragma once

#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "qdag/program.hpp"

namespace qdag {

/// Object, relation and action label sets a corpus draws from.
struct Vocabulary {
  std::set<std::string> objects;
  std::set<std::string> relations;
  std::set<std::string> actions;

  bool has_object(const std::string& l) const { return objects.contains(l); }
  bool has_relation(const std::string& l) const { return relations.contains(l); }
  bool has_action(const std::string& l) const { return actions.contains(l); }

  static Vocabulary from_json(const nlohmann::json& j);
  static Vocabulary load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Small Charades-like sample shipped with the library.
const Vocabulary& default_vocabulary();

/// Throws ProgramError naming the first label not in `vocab`.
void validate_labels(const Program& p, const Vocabulary& vocab);

}  // namespace qdag
