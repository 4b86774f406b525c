#include "qdag/templates.hpp"

#include <fstream>
#include <map>
#include <set>
#include <vector>

namespace qdag {

namespace {

const char* kDefaultTemplates = R"json({
  "objExists":         {"question": "Does a {label} exist?", "indirect": "the {label}"},
  "relationExists":    {"question": "Is the person {label} something?", "indirect": "{label}"},
  "actionExists":      {"question": "Is the person {label}?", "indirect": "{label}"},
  "interactionExists": {"question": "Is a {1:label} {2} a {3:label}?", "indirect": "{2} a {3:label}"},
  "objects":           {"question": "What is {1} {2}?", "indirect": "object that {1} is {2}"},
  "actions":           {"question": "What is the person doing?", "indirect": "action that the person is doing"},
  "first":             {"question": "What is the first {1}?", "indirect": "the first {1}"},
  "last":              {"question": "What is the last {1}?", "indirect": "the last {1}"},
  "longest":           {"question": "What is the longest {1}?", "indirect": "the longest {1}"},
  "shortest":          {"question": "What is the shortest {1}?", "indirect": "the shortest {1}"},
  "and":               {"question": "Is the person {1} and {2}?", "indirect": "{1} and {2}"},
  "xor":               {"question": "Is the person {1} but not {2}?", "indirect": "{1} but not {2}"},
  "equals":            {"question": "Is a {1:label} {2}?", "indirect": "{1:label}"},
  "longerThan":        {"question": "Does the person spend more time {label} than {label2}?", "indirect": "{label} for longer than {label2}"},
  "shorterThan":       {"question": "Does the person spend less time {label} than {label2}?", "indirect": "{label} for less time than {label2}"},
  "occursBefore":      {"question": "Is the person {1} before {2}?", "indirect": "{1} before {2}"},
  "occursAfter":       {"question": "Is the person {1} after {2}?", "indirect": "{1} after {2}"},
  "chooseObject":      {"question": "Is the {1.1:label} or the {2.1:label} {1.2}?", "indirect": "the {1.1:label} or the {2.1:label}"},
  "chooseTime":        {"question": "Is the person {1.1} before or after {2.2}?", "indirect": "{1.1} before or after {2.2}"},
  "longerChoose":      {"question": "Does the person spend more time {1:label} or {2:label}?", "indirect": "{1:label} or {2:label} for longer"},
  "shorterChoose":     {"question": "Does the person spend less time {1:label} or {2:label}?", "indirect": "{1:label} or {2:label} for less time"},
  "before":            {"question": "{1:stem} before {2}?", "indirect": "{1} before {2}"},
  "after":             {"question": "{1:stem} after {2}?", "indirect": "{1} after {2}"},
  "while":             {"question": "{1:stem} while {2}?", "indirect": "{1} while {2}"},
  "between":           {"question": "{1:stem} between {2} and {3}?", "indirect": "{1} between {2} and {3}"}
}
)json";

struct Shape {
  int slots;   // program arguments
  int labels;  // label atoms
};

// Slot counts per grammar function; between is the only 3-argument localizer.
const std::map<std::string, Shape, std::less<>>& shapes() {
  static const std::map<std::string, Shape, std::less<>> s{
      {"objExists", {0, 1}},     {"relationExists", {0, 1}}, {"actionExists", {0, 1}},
      {"interactionExists", {3, 0}}, {"objects", {2, 0}},    {"actions", {0, 0}},
      {"first", {1, 0}},         {"last", {1, 0}},           {"longest", {1, 0}},
      {"shortest", {1, 0}},      {"and", {2, 0}},            {"xor", {2, 0}},
      {"equals", {2, 0}},        {"longerThan", {0, 2}},     {"shorterThan", {0, 2}},
      {"occursBefore", {2, 0}},  {"occursAfter", {2, 0}},    {"chooseObject", {2, 0}},
      {"chooseTime", {2, 0}},    {"longerChoose", {2, 0}},   {"shorterChoose", {2, 0}},
      {"before", {2, 0}},        {"after", {2, 0}},          {"while", {2, 0}},
      {"between", {3, 0}},
  };
  return s;
}

std::string template_key(const Program& p) {
  if (p.op() == Op::Localized) return std::string(localizer_name(*p.localizer()));
  return std::string(function_name(p));
}

enum class Field { Indirect, Label, Label2, Stem, Question };

struct Placeholder {
  std::vector<int> path;  // empty: the node itself
  Field field = Field::Indirect;
};

Placeholder parse_placeholder(std::string_view body, std::string_view tmpl) {
  auto fail = [&](const std::string& why) -> Placeholder {
    throw TemplateError("malformed placeholder {" + std::string(body) + "} in \"" +
                        std::string(tmpl) + "\": " + why);
  };
  Placeholder ph;
  std::string_view path = body;
  std::string_view field;
  if (const auto colon = body.find(':'); colon != std::string_view::npos) {
    path = body.substr(0, colon);
    field = body.substr(colon + 1);
  } else if (body == "label" || body == "label2") {
    path = {};
    field = body;
  }
  if (field.empty())
    ph.field = Field::Indirect;
  else if (field == "label")
    ph.field = Field::Label;
  else if (field == "label2")
    ph.field = Field::Label2;
  else if (field == "stem")
    ph.field = Field::Stem;
  else if (field == "question")
    ph.field = Field::Question;
  else
    return fail("unknown field");

  std::size_t i = 0;
  while (i < path.size()) {
    int n = 0;
    const std::size_t start = i;
    while (i < path.size() && path[i] >= '0' && path[i] <= '9') n = n * 10 + (path[i++] - '0');
    if (i == start || n < 1) return fail("expected a 1-based argument index");
    ph.path.push_back(n);
    if (i < path.size()) {
      if (path[i] != '.') return fail("unexpected character");
      if (++i == path.size()) return fail("trailing '.'");
    }
  }
  if (ph.path.empty() && (ph.field == Field::Indirect || ph.field == Field::Stem ||
                          ph.field == Field::Question))
    return fail("a node cannot reference its own text");
  return ph;
}

template <class Fn>
void for_each_placeholder(std::string_view tmpl, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    const auto close_stray = tmpl.find('}', pos);
    if (close_stray < open) throw TemplateError("unbalanced '}' in \"" + std::string(tmpl) + "\"");
    if (open == std::string_view::npos) {
      fn(tmpl.substr(pos), std::string_view{}, false);
      return;
    }
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos)
      throw TemplateError("unterminated placeholder in \"" + std::string(tmpl) + "\"");
    fn(tmpl.substr(pos, open - pos), tmpl.substr(open + 1, close - open - 1), true);
    pos = close + 1;
  }
}

void validate_entry(const std::string& key, const TemplateTable::Entry& e) {
  const auto it = shapes().find(key);
  if (it == shapes().end()) throw TemplateError("unknown template key '" + key + "'");
  const Shape shape = it->second;
  for (const std::string* tmpl : {&e.question, &e.indirect}) {
    if (tmpl->empty()) throw TemplateError("empty template for '" + key + "'");
    std::set<int> used;
    for_each_placeholder(*tmpl, [&](std::string_view, std::string_view body, bool has) {
      if (!has) return;
      const auto ph = parse_placeholder(body, *tmpl);
      if (ph.path.empty()) {
        const int need = ph.field == Field::Label2 ? 2 : 1;
        if (shape.labels < need)
          throw TemplateError("template '" + key + "' references a label it does not carry");
        used.insert(-need);
      } else {
        if (ph.path.front() > shape.slots)
          throw TemplateError("template '" + key + "' references argument " +
                              std::to_string(ph.path.front()) + " of " +
                              std::to_string(shape.slots));
        used.insert(ph.path.front());
      }
    });
    // Question templates must mention every slot so no argument is silently dropped.
    if (tmpl == &e.question) {
      for (int s = 1; s <= shape.slots; ++s)
        if (!used.contains(s))
          throw TemplateError("question template '" + key + "' omits argument " +
                              std::to_string(s));
      for (int l = 1; l <= shape.labels; ++l)
        if (!used.contains(-l))
          throw TemplateError("question template '" + key + "' omits label " + std::to_string(l));
    }
  }
}

class Renderer {
 public:
  explicit Renderer(const TemplateTable& t) : t_(t) {}

  const RenderedQuestion& render(const Program& p) {
    if (const auto it = cache_.find(&p); it != cache_.end()) return it->second;
    const auto& e = t_.entry(template_key(p));
    RenderedQuestion r;
    r.question = fill(p, e.question);
    r.indirect = fill(p, e.indirect);
    return cache_.emplace(&p, std::move(r)).first->second;
  }

 private:
  std::string fill(const Program& p, const std::string& tmpl) {
    std::string out;
    for_each_placeholder(tmpl, [&](std::string_view text, std::string_view body, bool has) {
      out += text;
      if (has) out += resolve(p, parse_placeholder(body, tmpl), tmpl);
    });
    return out;
  }

  std::string resolve(const Program& p, const Placeholder& ph, const std::string& tmpl) {
    const Program* node = &p;
    for (int idx : ph.path) {
      if (static_cast<std::size_t>(idx) > node->args().size())
        throw TemplateError("placeholder path out of range in \"" + tmpl + "\" for " +
                            std::string(function_name(p)));
      node = &node->arg(static_cast<std::size_t>(idx - 1));
    }
    switch (ph.field) {
      case Field::Label:
      case Field::Label2: {
        const std::size_t i = ph.field == Field::Label ? 0 : 1;
        if (node->labels().size() <= i)
          throw TemplateError("placeholder in \"" + tmpl + "\" names a node without labels");
        return node->labels()[i];
      }
      case Field::Indirect:
        return render(*node).indirect;
      case Field::Question:
        return render(*node).question;
      case Field::Stem: {
        std::string q = render(*node).question;
        if (!q.empty() && q.back() == '?') q.pop_back();
        return q;
      }
    }
    return {};
  }

  const TemplateTable& t_;
  std::map<const Program*, RenderedQuestion> cache_;
};

}  // namespace

TemplateTable TemplateTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw TemplateError("template table must be a JSON object");
  TemplateTable t;
  for (const auto& [key, v] : j.items()) {
    if (!v.is_object() || !v.contains("question") || !v.contains("indirect"))
      throw TemplateError("template '" + key + "' needs \"question\" and \"indirect\"");
    Entry e{v.at("question").get<std::string>(), v.at("indirect").get<std::string>()};
    validate_entry(key, e);
    t.entries_.emplace(key, std::move(e));
  }
  for (const auto& [key, shape] : shapes())
    if (!t.entries_.contains(key)) throw TemplateError("missing template entry for '" + key + "'");
  return t;
}

TemplateTable TemplateTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open templates file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw TemplateError(path.string() + ": " + ex.what());
  }
  return from_json(j);
}

nlohmann::json TemplateTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, e] : entries_) j[k] = {{"question", e.question}, {"indirect", e.indirect}};
  return j;
}

const TemplateTable::Entry& TemplateTable::entry(std::string_view function) const {
  const auto it = entries_.find(function);
  if (it == entries_.end())
    throw TemplateError("missing template entry for '" + std::string(function) + "'");
  return it->second;
}

const char* default_templates_json() { return kDefaultTemplates; }

const TemplateTable& default_templates() {
  static const TemplateTable t = TemplateTable::from_json(nlohmann::json::parse(kDefaultTemplates));
  return t;
}

RenderedQuestion render_question(const Program& p, const TemplateTable& t) {
  return Renderer(t).render(p);
}

}  // namespace qdag
