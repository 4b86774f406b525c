#include "qdag/io.hpp"

#include <cstdio>
#include <fstream>

#include "qdag/parser.hpp"

namespace qdag {

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    }
    try {
      fn(j);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    } catch (const ParseError& e) {
      throw SchemaError(where + e.what());
    } catch (const ProgramError& e) {
      throw SchemaError(where + e.what());
    } catch (const std::logic_error& e) {
      throw SchemaError(where + e.what());
    }
  }
  if (in.bad()) throw IoError("read error on " + path.string());
}

std::vector<SceneGraph> read_scene_graphs(const std::filesystem::path& path) {
  return read_jsonl<SceneGraph>(path, SceneGraph::from_json);
}

std::vector<QuestionRecord> read_questions(const std::filesystem::path& path) {
  return read_jsonl<QuestionRecord>(path, QuestionRecord::from_json);
}

std::vector<QuestionDag> read_dags(const std::filesystem::path& path) {
  return read_jsonl<QuestionDag>(path, QuestionDag::from_json);
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  return read_jsonl<Prediction>(path, Prediction::from_json);
}

std::vector<NegativeAnnotation> read_negatives(const std::filesystem::path& path) {
  return read_jsonl<NegativeAnnotation>(path, NegativeAnnotation::from_json);
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
  f_ = std::fopen(path.string().c_str(), "wb");
  if (!f_) throw IoError("cannot write " + path.string());
}

JsonlWriter::~JsonlWriter() {
  if (f_) std::fclose(f_);
}

void JsonlWriter::write(const nlohmann::json& j) {
  const auto s = j.dump() + "\n";
  if (std::fwrite(s.data(), 1, s.size(), f_) != s.size())
    throw IoError("write error on " + path_.string());
}

void JsonlWriter::close() {
  if (f_ && std::fclose(f_) != 0) {
    f_ = nullptr;
    throw IoError("write error on " + path_.string());
  }
  f_ = nullptr;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write error on " + path.string());
}

}  // namespace qdag
