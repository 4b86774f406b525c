#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdag/io.hpp"

namespace fs = std::filesystem;
using namespace qdag;

namespace {

struct Workdir {
  fs::path root;
  Workdir() : root(fs::temp_directory_path() / ("qdag_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }
};

int cli(const std::string& args) {
  const std::string cmd = std::string(QDAG_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write_lines(const fs::path& p, const std::vector<std::string>& ls) {
  std::ofstream out(p);
  for (const auto& l : ls) out << l << "\n";
}

}  // namespace

TEST_CASE("cli: exit codes and warnings") {
  Workdir w;
  const auto gen = w.root / "gen";
  REQUIRE(cli("gen --seed 3 --videos 3 --out " + gen.string()) == 0);
  const std::string dags = (gen / "dags.jsonl").string();
  const std::string qs = (gen / "questions.jsonl").string();
  const std::string out = " --out-dir " + (w.root / "eval").string();

  // The oracle needs --scene-graphs.
  CHECK(cli("evaluate --dags " + dags + " --questions " + qs + " --baseline oracle" + out) == 2);
  CHECK(cli("evaluate --dags " + dags + " --questions " + qs + " --baseline most-likely" + out) == 0);
  CHECK(cli("evaluate --dags " + dags + " --questions " + qs +
             " --baseline most-likely --ban-list bogus" + out) == 2);
  CHECK(cli("evaluate --dags " + dags + " --questions " + (w.root / "nope.jsonl").string() +
             " --baseline random" + out) == 3);
  CHECK(cli("frobnicate") == 2);

  auto q_lines = lines(gen / "questions.jsonl");
  auto broken = q_lines;
  broken[1] = "{\"id\": ";
  write_lines(w.root / "broken.jsonl", broken);
  CHECK(cli("evaluate --dags " + dags + " --questions " + (w.root / "broken.jsonl").string() +
             " --baseline random" + out) == 4);

  auto bad_program = nlohmann::json::parse(q_lines[0]);
  bad_program["program"] = "objExists(person";
  broken = q_lines;
  broken[0] = bad_program.dump();
  write_lines(w.root / "bad_program.jsonl", broken);
  CHECK(cli("evaluate --dags " + dags + " --questions " + (w.root / "bad_program.jsonl").string() +
             " --baseline random" + out) == 4);

  auto missing = q_lines;
  missing.erase(missing.begin());
  write_lines(w.root / "missing.jsonl", missing);
  CHECK(cli("evaluate --dags " + dags + " --questions " + (w.root / "missing.jsonl").string() +
             " --baseline random" + out) == 5);

  // Predictions for unknown ids are ignored and counted.
  const auto preds = w.root / "preds.jsonl";
  REQUIRE(cli("baseline --kind constant --answer no --questions " + qs + " --out " + preds.string()) == 0);
  auto p_lines = lines(preds);
  p_lines.push_back(R"({"id": "nowhere/q0", "answer": "yes"})");
  write_lines(preds, p_lines);
  REQUIRE(cli("evaluate --dags " + dags + " --questions " + qs + " --predictions " +
               preds.string() + out) == 0);
  std::ifstream rep(w.root / "eval" / "report.json");
  const auto j = nlohmann::json::parse(rep);
  CHECK(j["unknown_prediction_ids"] == 1);

  CHECK(cli("audit --dags " + dags + " --questions " + qs) == 0);
}

TEST_CASE("cli: answer reproduces generated gold") {
  Workdir w;
  const auto gen = w.root / "gen";
  REQUIRE(cli("gen --seed 4 --videos 3 --out " + gen.string()) == 0);
  // Strip every non-annotated answer and re-derive it.
  std::vector<std::string> stripped;
  for (const auto& l : lines(gen / "questions.jsonl")) {
    auto q = nlohmann::json::parse(l);
    if (q["answer_provenance"] != "annotated") {
      q["answer"] = nullptr;
      q["answer_provenance"] = "unknown";
    }
    stripped.push_back(q.dump());
  }
  write_lines(w.root / "stripped.jsonl", stripped);
  const auto answered = w.root / "answered.jsonl";
  REQUIRE(cli("answer --scene-graphs " + (gen / "scene_graphs.jsonl").string() + " --questions " +
               (w.root / "stripped.jsonl").string() + " --dags " + (gen / "dags.jsonl").string() +
               " --out-questions " + answered.string()) == 0);
  const auto original = read_questions(gen / "questions.jsonl");
  const auto again = read_questions(answered);
  REQUIRE(original.size() == again.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    CHECK(original[i].id == again[i].id);
    CHECK(original[i].answer == again[i].answer);
    CHECK(original[i].provenance == again[i].provenance);
  }
}
