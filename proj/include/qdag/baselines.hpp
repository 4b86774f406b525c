#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdag/records.hpp"
#include "qdag/scene_graph.hpp"
#include "qdag/vocabulary.hpp"

namespace qdag {

class Predictor {
 public:
  enum class Kind : std::uint8_t { Oracle, MostLikely, Constant, Random };

  /// Answers by executing each program on its video's scene graph.
  static Predictor oracle(const std::vector<SceneGraph>& graphs);
  /// Modal gold answer per question type; ties go to the lexicographically
  /// smallest answer. Types missing from `train` answer `fallback` and are
  /// listed in unfit_types().
  static Predictor most_likely(const std::vector<QuestionRecord>& train,
                               const std::string& fallback = "no");
  static Predictor constant(std::string answer);
  /// Uniform over each question's answer alphabet, seeded per question id.
  static Predictor random(std::uint64_t seed, const Vocabulary& vocab);

  Kind kind() const { return kind_; }
  const std::map<QuestionType, std::string>& modes() const { return modes_; }
  const std::set<QuestionType>& unfit_types() const { return unfit_; }

  /// Raw answer text. The oracle throws UndefinedAnswer where the program
  /// has no answer, and std::out_of_range for an unknown video.
  std::string predict(const QuestionRecord& q) const;

  /// Predictions for every record the predictor can answer, in input order.
  std::vector<Prediction> predict_all(const std::vector<QuestionRecord>& qs) const;

 private:
  Kind kind_ = Kind::Constant;
  std::map<std::string, SceneGraph> graphs_;
  std::map<QuestionType, std::string> modes_;
  std::set<QuestionType> unfit_;
  std::string constant_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> objects_, actions_;
};

}  // namespace qdag
