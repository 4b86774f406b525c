#include "qdag/records.hpp"

#include <array>
#include <stdexcept>

#include "qdag/parser.hpp"

namespace qdag {

namespace {
constexpr std::array<std::string_view, 4> kProvenanceNames{"executed", "propagated", "annotated",
                                                           "unknown"};
}

std::string_view to_string(Provenance p) { return kProvenanceNames[static_cast<std::size_t>(p)]; }

std::optional<Provenance> parse_provenance(std::string_view name) {
  for (std::size_t i = 0; i < kProvenanceNames.size(); ++i)
    if (kProvenanceNames[i] == name) return static_cast<Provenance>(i);
  return std::nullopt;
}

nlohmann::json QuestionRecord::to_json() const {
  nlohmann::json j{{"id", id},
                   {"video_id", video_id},
                   {"program", render_program(*program)},
                   {"question", question},
                   {"qtype", to_string(qtype)}};
  j["answer"] = answer ? nlohmann::json(answer->to_string()) : nlohmann::json(nullptr);
  j["answer_provenance"] = to_string(provenance);
  return j;
}

QuestionRecord QuestionRecord::from_json(const nlohmann::json& j) {
  QuestionRecord r;
  r.id = j.at("id").get<std::string>();
  r.video_id = j.at("video_id").get<std::string>();
  r.program = parse_program(j.at("program").get<std::string>());
  r.question = j.value("question", std::string());
  const auto qt = j.at("qtype").get<std::string>();
  const auto parsed = parse_question_type(qt);
  if (!parsed) throw std::invalid_argument("unknown qtype '" + qt + "'");
  r.qtype = *parsed;
  if (j.contains("answer") && !j.at("answer").is_null())
    r.answer = parse_answer(j.at("answer").get<std::string>(), answer_kind(*r.program));
  const auto prov = j.value("answer_provenance", std::string(r.answer ? "executed" : "unknown"));
  const auto p = parse_provenance(prov);
  if (!p) throw std::invalid_argument("unknown answer_provenance '" + prov + "'");
  r.provenance = *p;
  return r;
}

Prediction Prediction::from_json(const nlohmann::json& j) {
  Prediction p;
  p.id = j.at("id").get<std::string>();
  const auto& a = j.at("answer");
  p.answer = a.is_string() ? a.get<std::string>() : a.dump();
  return p;
}

NegativeAnnotation NegativeAnnotation::from_json(const nlohmann::json& j) {
  NegativeAnnotation n;
  n.video_id = j.at("video_id").get<std::string>();
  for (const auto& o : j.at("absent_objects")) n.absent_objects.push_back(canonical_label(o.get<std::string>()));
  return n;
}

}  // namespace qdag
