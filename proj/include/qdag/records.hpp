#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdag/answer.hpp"
#include "qdag/program.hpp"
#include "qdag/question_type.hpp"

namespace qdag {

enum class Provenance : std::uint8_t { Executed, Propagated, Annotated, Unknown };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view name);

/// One line of the questions file.
struct QuestionRecord {
  std::string id;  // "<video_id>/q<k>", unique per (video, program)
  std::string video_id;
  ProgramPtr program;
  std::string question;
  QuestionType qtype;
  std::optional<Answer> answer;
  Provenance provenance = Provenance::Unknown;

  nlohmann::json to_json() const;
  static QuestionRecord from_json(const nlohmann::json& j);
};

/// One line of a predictions file. The answer is kept as raw text and only
/// interpreted against the question's answer kind at evaluation time.
struct Prediction {
  std::string id;
  std::string answer;

  nlohmann::json to_json() const { return {{"id", id}, {"answer", answer}}; }
  static Prediction from_json(const nlohmann::json& j);
};

/// Objects an annotator marked as not appearing in a video.
struct NegativeAnnotation {
  std::string video_id;
  std::vector<std::string> absent_objects;

  nlohmann::json to_json() const {
    return {{"video_id", video_id}, {"absent_objects", absent_objects}};
  }
  static NegativeAnnotation from_json(const nlohmann::json& j);
};

}  // namespace qdag
