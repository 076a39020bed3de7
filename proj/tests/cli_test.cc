/*
 * Copyright 2026 The cohs-cqg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "golden_support.h"
#include "json.hpp"

using cohs::testing::fixture_path;
using cohs::testing::golden;
using cohs::testing::read_text;
using cohs::testing::sample_context_path;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cohs");
  std::ostringstream out, err;
  int code = cohs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Per-test scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cohs_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    std::string p = (path_ / name).string();
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("no subcommand is a usage error") {
  CHECK(run({}).code == cohs::cli::kUsageError);
  CHECK(run({"frobnicate"}).code == cohs::cli::kUsageError);
  CHECK(run({"--help"}).code == cohs::cli::kOk);
}

TEST_CASE("select: golden output") {
  Result r = run({"select", "--dataset", fixture_path(), "--embedder", "stub:7", "--p", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out == golden("select_fixture_p1.jsonl", r.out));
  auto records = parse_lines(r.out);
  REQUIRE(records.size() == 7);
  for (const auto& rec : records) {
    for (const char* key : {"conversation_id", "turn", "window_start", "u", "k", "sum", "fallback"}) {
      CHECK(rec.contains(key));
    }
  }
  Result again = run({"select", "--dataset", fixture_path(), "--embedder", "stub:7", "--p", "1"});
  CHECK(again.out == r.out);
}

TEST_CASE("select: inf threshold selects everything") {
  Result r = run({"select", "--dataset", fixture_path(), "--p", "inf"});
  REQUIRE(r.code == 0);
  for (const auto& rec : parse_lines(r.out)) {
    CHECK(rec["fallback"] == true);
    CHECK(rec["window_start"] == 0);
    CHECK(rec["k"] == rec["turn"].get<int>() - 1);
  }
}

TEST_CASE("select: one turn and output file") {
  TempDir dir;
  Result r = run({"select", "--dataset", fixture_path(), "--turn", "fx-001:3", "--p", "1",
                  "--out", dir.path("sel.jsonl")});
  REQUIRE(r.code == 0);
  auto records = parse_lines(read_text(dir.path("sel.jsonl")));
  REQUIRE(records.size() == 1);
  CHECK(records[0]["conversation_id"] == "fx-001");
  CHECK(records[0]["turn"] == 3);
}

TEST_CASE("select: errors") {
  Result missing = run({"select", "--dataset", "/nonexistent/coqa.json"});
  CHECK(missing.code == cohs::cli::kUsageError);
  CHECK_FALSE(missing.err.empty());
  CHECK(run({"select", "--dataset", fixture_path(), "--p", "-1"}).code == cohs::cli::kUsageError);
  CHECK(run({"select", "--dataset", fixture_path(), "--p", "abc"}).code == cohs::cli::kUsageError);
  CHECK(run({"select", "--dataset", fixture_path(), "--mode", "topk"}).code ==
        cohs::cli::kUsageError);
  CHECK(run({"select", "--dataset", fixture_path(), "--embedder", "stub:x"}).code ==
        cohs::cli::kUsageError);
  CHECK(run({"select", "--dataset", fixture_path(), "--turn", "fx-009:2"}).code ==
        cohs::cli::kUsageError);
  CHECK(run({"select"}).code == cohs::cli::kUsageError);
}

TEST_CASE("analyze") {
  Result one = run({"analyze", "--dataset", fixture_path(), "--p", "2"});
  REQUIRE(one.code == 0);
  CHECK(one.out.find("# mode=cohs") == 0);

  TempDir dir;
  Result sweep = run({"analyze", "--dataset", fixture_path(), "--out", dir.path("stats.json")});
  REQUIRE(sweep.code == 0);
  auto rows = nlohmann::json::parse(read_text(dir.path("stats.json")));
  REQUIRE(rows.size() == 7);
  CHECK(rows.back()["p"] == "inf");
  double prev = 0.0;
  for (const auto& row : rows) {
    double total = row["avg_sentences"].get<double>() + row["avg_turns"].get<double>();
    CHECK(total >= prev - 1e-12);
    prev = total;
  }

  Result single = run({"analyze", "--dataset", fixture_path(), "--p", "2", "--out",
                       dir.path("one.json")});
  REQUIRE(single.code == 0);
  CHECK(nlohmann::json::parse(read_text(dir.path("one.json"))).size() == 1);
}

TEST_CASE("prompt") {
  Result r = run({"prompt", "--dataset", fixture_path(), "--turn", "fx-001:3", "--p", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "Answer: Dr. Lee, Dr. Lee lived next door to Mary Context: Every morning Mary walked Max "
        "to the park. Dr. Lee lived next door to Mary. [SEP] Where did Mary live? in a small "
        "house near the river What was her dog's name? Max\n");

  Result first = run({"prompt", "--dataset", fixture_path(), "--turn", "fx-002:1"});
  REQUIRE(first.code == 0);
  CHECK(first.out.find("[SEP]") == std::string::npos);

  Result no_rationale = run({"prompt", "--dataset", fixture_path(), "--turn", "fx-002:4"});
  CHECK(no_rationale.code == cohs::cli::kUsageError);
  CHECK_FALSE(no_rationale.err.empty());
  CHECK(run({"prompt", "--dataset", fixture_path(), "--turn", "all"}).code ==
        cohs::cli::kUsageError);
}

TEST_CASE("pipeline") {
  Result r = run({"pipeline", "--context", sample_context_path()});
  REQUIRE(r.code == 0);
  CHECK(r.out == golden("pipeline_sample.json", r.out));
  auto doc = nlohmann::json::parse(r.out);
  auto turns = doc["data"][0]["questions"].size();
  CHECK(turns <= 5);

  Result no_qf = run({"pipeline", "--context", sample_context_path(), "--no-qf", "--max-turns", "20"});
  Result with_qf = run({"pipeline", "--context", sample_context_path(), "--max-turns", "20"});
  REQUIRE(no_qf.code == 0);
  REQUIRE(with_qf.code == 0);
  CHECK(nlohmann::json::parse(no_qf.out)["data"][0]["questions"].size() >=
        nlohmann::json::parse(with_qf.out)["data"][0]["questions"].size());

  Result two = run({"pipeline", "--context", sample_context_path(), "--max-turns", "2"});
  REQUIRE(two.code == 0);
  CHECK(nlohmann::json::parse(two.out)["data"][0]["questions"].size() == 2);

  Result no_ae = run({"pipeline", "--context", sample_context_path(), "--no-ae", "--no-qf",
                      "--max-turns", "2"});
  REQUIRE(no_ae.code == 0);
  auto ans = nlohmann::json::parse(no_ae.out)["data"][0]["answers"];
  CHECK(ans[0]["input_text"] == ans[0]["span_text"]);

  CHECK(run({"pipeline", "--context", sample_context_path(), "--max-turns", "0"}).code ==
        cohs::cli::kUsageError);
  CHECK(run({"pipeline", "--context", "/nonexistent.txt"}).code == cohs::cli::kUsageError);
}

TEST_CASE("eval") {
  TempDir dir;
  std::string refs = dir.write("refs.txt", "the cat sat on the mat\na dog ran home today\n");
  Result same = run({"eval", "--references", refs, "--hypotheses", refs});
  REQUIRE(same.code == 0);
  auto report = nlohmann::json::parse(same.out);
  for (const char* key : {"bleu1", "bleu2", "bleu3", "bleu4", "rouge_l"}) {
    CHECK(report[key].get<double>() == 1.0);
  }

  // A 3-token segment has no 4-grams but still adds 1 to the 4-gram
  // denominator: BLEU-4 = (2/3)^(1/4).
  std::string short_refs = dir.write("short.txt", "the cat sat\na dog ran home today\n");
  auto short_report = nlohmann::json::parse(
      run({"eval", "--references", short_refs, "--hypotheses", short_refs}).out);
  CHECK(short_report["bleu3"].get<double>() == 1.0);
  CHECK(short_report["bleu4"].get<double>() == doctest::Approx(std::pow(2.0 / 3.0, 0.25)));
  CHECK(short_report["rouge_l"].get<double>() == 1.0);

  std::string ref = dir.write("ref.txt", "the cat sat\n");
  std::string hyp = dir.write("hyp.txt", "the cat\n");
  Result pair = run({"eval", "--references", ref, "--hypotheses", hyp});
  REQUIRE(pair.code == 0);
  CHECK(nlohmann::json::parse(pair.out)["rouge_l"].get<double>() == 0.8);

  Result mismatch = run({"eval", "--references", refs, "--hypotheses", hyp});
  CHECK(mismatch.code == cohs::cli::kUsageError);
  CHECK_FALSE(mismatch.err.empty());
}

TEST_CASE("config file: flags win, unknown keys rejected") {
  TempDir dir;
  std::string cfg = dir.write("run.json", nlohmann::json{{"dataset", fixture_path()},
                                                         {"p", "inf"},
                                                         {"embedder", "stub:7"}}
                                              .dump());
  Result from_file = run({"select", "--config", cfg});
  REQUIRE(from_file.code == 0);
  for (const auto& rec : parse_lines(from_file.out)) CHECK(rec["fallback"] == true);

  Result overridden = run({"select", "--config", cfg, "--p", "1"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out == read_text(cohs::testing::golden_path("select_fixture_p1.jsonl")));

  std::string numeric = dir.write("num.json", R"({"dataset": ")" + fixture_path() + R"(", "p": 1})");
  CHECK(run({"select", "--config", numeric}).out == overridden.out);

  std::string bad = dir.write("bad.json", R"({"threshold": 3})");
  CHECK(run({"select", "--config", bad}).code == cohs::cli::kUsageError);
  std::string broken = dir.write("broken.json", "{");
  CHECK(run({"select", "--config", broken}).code == cohs::cli::kUsageError);
  CHECK(run({"select", "--config", dir.path("absent.json")}).code == cohs::cli::kUsageError);
}
