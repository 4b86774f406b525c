#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qdag/program.hpp"

namespace qdag {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Question and indirect-reference templates, keyed by grammar function
/// name ("objExists", "after", ...).
///
/// Placeholders:
///   {label}, {label2}   the node's own label atoms (leaves only)
///   {N}                 indirect reference of argument N (1-based)
///   {N.M}               indirect reference of argument M of argument N
///   {path:label}        first label of the referenced node (also :label2)
///   {path:stem}         the referenced node's question without the '?'
///   {path:question}     the referenced node's full question
class TemplateTable {
 public:
  struct Entry {
    std::string question;
    std::string indirect;
  };

  /// Throws TemplateError if a function is missing or a template references
  /// a slot the function does not have.
  static TemplateTable from_json(const nlohmann::json& j);
  static TemplateTable load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const Entry& entry(std::string_view function) const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Shipped template set covering every program variant.
const TemplateTable& default_templates();
const char* default_templates_json();

struct RenderedQuestion {
  std::string question;
  std::string indirect;
};

RenderedQuestion render_question(const Program& p, const TemplateTable& t);

}  // namespace qdag
