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

#include "cohs/prompting.h"

#include <string>

#include "cohs/errors.h"
#include "doctest.h"
#include "golden_support.h"

using namespace cohs;

TEST_CASE("serialize_history") {
  CHECK(serialize_history({{"Who?", "Mary"}, {"Where?", "Rome"}}) == "Who? Mary Where? Rome");
  CHECK(serialize_history({}) == "");
  CHECK(serialize_history({{"A", ""}}) == "A");
  CHECK(serialize_history({{"A", ""}, {"B", "c"}}) == "A B c");
}

TEST_CASE("assemble_prompt: template instances") {
  PromptSpec spec{"Rome", "He lived in Rome.", {"He lived in Rome."}, {{"Who?", "Marco"}}};
  CHECK(assemble_prompt(spec) ==
        "Answer: Rome, He lived in Rome. Context: He lived in Rome. [SEP] Who? Marco");

  spec.history.clear();
  CHECK(assemble_prompt(spec) == "Answer: Rome, He lived in Rome. Context: He lived in Rome.");

  spec.window = {"First one.", "Second one."};
  CHECK(assemble_prompt(spec) ==
        "Answer: Rome, He lived in Rome. Context: First one. Second one.");

  spec.window.clear();
  CHECK_THROWS_AS(assemble_prompt(spec), EmptyWindowError);
}

TEST_CASE("assemble_prompt: exactly one separator, order preserved") {
  PromptSpec spec{"x", "y", {"s1.", "s2.", "s3."}, {{"q1", "a1"}, {"q2", "a2"}, {"q3", "a3"}}};
  std::string p = assemble_prompt(spec);
  CHECK(p.find("[SEP]") == p.rfind("[SEP]"));
  CHECK(p.find("s1.") < p.find("s2."));
  CHECK(p.find("s2.") < p.find("s3."));
  CHECK(p.find("q1 a1") < p.find("q2 a2"));
  CHECK(p.find("q2 a2") < p.find("q3 a3"));
}

TEST_CASE("make_prompt_spec takes the window and the history suffix") {
  ContextDoc doc("One. Two. Three. Four.");
  std::vector<QATurn> history(3);
  for (int i = 0; i < 3; ++i) {
    history[i].turn_id = i + 1;
    history[i].question = "q" + std::to_string(i + 1);
    history[i].answer = "a" + std::to_string(i + 1);
  }
  PromptSpec spec = make_prompt_spec(doc, history, Selection{1, 2, 2, 0.0, false}, "A", "R");
  CHECK(spec.window == std::vector<std::string>{"Two.", "Three."});
  CHECK(spec.history == std::vector<QAPair>{{"q2", "a2"}, {"q3", "a3"}});
  CHECK(assemble_prompt(spec) == "Answer: A, R Context: Two. Three. [SEP] q2 a2 q3 a3");

  CHECK_THROWS_AS(make_prompt_spec(doc, history, Selection{3, 2, 1, 0.0, false}, "A", "R"),
                  IndexError);
  CHECK_THROWS_AS(make_prompt_spec(doc, history, Selection{0, 1, 4, 0.0, false}, "A", "R"),
                  IndexError);
}

TEST_CASE("fixture prompts match the goldens") {
  for (auto [p, name] : {std::pair{1.0, "fixture_prompts_p1.jsonl"},
                         std::pair{5.0, "fixture_prompts_p5.jsonl"}}) {
    CAPTURE(name);
    std::string actual = cohs::testing::fixture_prompts_jsonl(p);
    CHECK(actual == cohs::testing::golden(name, actual));
  }
}
