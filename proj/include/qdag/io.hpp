#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdag/decomposer.hpp"
#include "qdag/records.hpp"
#include "qdag/scene_graph.hpp"

namespace qdag {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line that is not valid JSON or does not match the expected record shape.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calls `fn` on each non-blank line's JSON; errors carry path:line.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&)>& fn);

template <class T, class Parse>
std::vector<T> read_jsonl(const std::filesystem::path& path, Parse parse) {
  std::vector<T> out;
  for_each_jsonl(path, [&](const nlohmann::json& j) { out.push_back(parse(j)); });
  return out;
}

std::vector<SceneGraph> read_scene_graphs(const std::filesystem::path& path);
std::vector<QuestionRecord> read_questions(const std::filesystem::path& path);
std::vector<QuestionDag> read_dags(const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
std::vector<NegativeAnnotation> read_negatives(const std::filesystem::path& path);

/// Writes one compact JSON document per line.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;
  void write(const nlohmann::json& j);
  void close();

 private:
  std::filesystem::path path_;
  std::FILE* f_ = nullptr;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qdag
