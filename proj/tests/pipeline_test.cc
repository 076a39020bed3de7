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

#include "cohs/pipeline.h"

#include <set>
#include <stdexcept>

#include "cohs/errors.h"
#include "cohs/text.h"
#include "doctest.h"
#include "golden_support.h"
#include "httplib.h"

using namespace cohs;
using cohs::testing::fixture_path;

namespace {

class FixedQA final : public QuestionAnswerer {
 public:
  explicit FixedQA(std::string answer) : answer_(std::move(answer)) {}

 private:
  QAResponse do_answer(const QARequest&) const override { return {answer_}; }
  std::string answer_;
};

ServiceClients with_qa(std::string predicted) {
  ServiceClients c = make_stub_suite(7);
  c.qa = std::make_shared<FixedQA>(std::move(predicted));
  return c;
}

SelectionParams params_p1() {
  SelectionParams p;
  p.p = 1.0;
  return p;
}

Conversation fixture_conversation(std::size_t i) { return load_coqa_file(fixture_path()).at(i); }

std::string conversation_json(const std::vector<QATurn>& turns, const ContextDoc& context) {
  Conversation conv{"golden", context, turns};
  return to_coqa_json({conv});
}

}  // namespace

TEST_CASE("select_next_rationale") {
  ConversationState state(ContextDoc("A. B. C. D. E."));
  REQUIRE(state.context.size() == 5);
  CHECK(select_next_rationale(state) == 0);
  state.used_rationale_sentences = {0, 1};
  CHECK(select_next_rationale(state) == 2);
  state.used_rationale_sentences = {0, 2};
  CHECK(select_next_rationale(state) == 1);
  state.used_rationale_sentences = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS(select_next_rationale(state), ExhaustedError);
}

TEST_CASE("extract_candidate_answers") {
  ServiceClients stubs = make_stub_suite(7);
  ConversationState state(ContextDoc("Mary met John. it was so."));
  CHECK(extract_candidate_answers(state, 0, stubs).spans ==
        std::vector<std::string>{"Mary", "John"});
  state.used_answers = {"mary"};
  CandidateAnswers c = extract_candidate_answers(state, 0, stubs);
  CHECK(c.rationale_sentence == 0);
  CHECK(c.spans == std::vector<std::string>{"John"});
  CHECK(extract_candidate_answers(state, 1, stubs).spans.empty());
  CHECK_THROWS_AS(extract_candidate_answers(state, 2, stubs), IndexError);
}

TEST_CASE("filter_question normalizes answers") {
  FilterVerdict v = filter_question("q?", "cat", "ctx", with_qa("The Cat"));
  CHECK(v.accepted);
  CHECK(v.predicted == "The Cat");
  CHECK(v.reason.empty());

  FilterVerdict r = filter_question("q?", "cat", "ctx", with_qa("dog"));
  CHECK_FALSE(r);
  CHECK(r.reason == "answer-mismatch");

  CHECK(filter_question("q?", "cat", "ctx", with_qa("cat ")));
  CHECK(filter_question("q?", "Dr. Lee", "ctx", with_qa("dr lee")));
  CHECK_THROWS_AS(filter_question("", "cat", "ctx", with_qa("cat")), std::invalid_argument);
  CHECK_THROWS_AS(filter_question("q?", "", "ctx", with_qa("cat")), std::invalid_argument);
}

TEST_CASE("answer_aware_generate: fixture goldens") {
  Conversation conv = fixture_conversation(0);
  ServiceClients stubs = make_stub_suite(7);

  AnswerAwareResult r2 = answer_aware_generate(make_answer_aware_task(conv, 2), params_p1(), stubs);
  CHECK(r2.selection.rationale_sentence == 1);
  CHECK(r2.prompt ==
        "Answer: Max, She had a dog named Max Context: Mary lived in a small house near the "
        "river. She had a dog named Max. Every morning Mary walked Max to the park. [SEP] Where "
        "did Mary live? in a small house near the river");
  CHECK(r2.question == "Q: Answer: Max, She had a dog named Max?");

  AnswerAwareResult r1 = answer_aware_generate(make_answer_aware_task(conv, 1), params_p1(), stubs);
  CHECK(r1.prompt.find("[SEP]") == std::string::npos);
  CHECK(r1.selection.selection.k == 0);
  CHECK(r1.selection.selection.u == 5);
}

TEST_CASE("answer_aware_generate: errors carry the turn") {
  Conversation fx2 = fixture_conversation(1);
  ServiceClients stubs = make_stub_suite(7);
  CHECK_THROWS_AS(answer_aware_generate(make_answer_aware_task(fx2, 4), params_p1(), stubs),
                  LocateError);

  httplib::Server probe;
  int port = probe.bind_to_any_port("127.0.0.1");
  ServiceClients remote = stubs;
  remote.embedder = make_http_embedder(
      ServiceEndpoint{"http://127.0.0.1:" + std::to_string(port), 500, 0});
  Conversation conv = fixture_conversation(0);
  try {
    answer_aware_generate(make_answer_aware_task(conv, 2), params_p1(), remote);
    FAIL("expected ServiceUnavailable");
  } catch (const ServiceUnavailable& e) {
    CHECK(std::string(e.what()).rfind("turn 2: ", 0) == 0);
  }
}

TEST_CASE("answer_unaware_step") {
  ServiceClients stubs = make_stub_suite(7);
  ConversationState state(ContextDoc(cohs::testing::read_text(cohs::testing::sample_context_path())));
  std::optional<GeneratedTurn> first;
  while (!first) first = answer_unaware_step(state, params_p1(), stubs);
  std::string line = first->question + " | " + first->answer + " | " +
                     std::to_string(first->rationale_sentence) + "\n";
  CHECK(line == cohs::testing::golden("sample_first_turn.txt", line));
  CHECK(state.generated_turns.size() == 1);
  CHECK(state.used_answers.contains(normalize_answer(first->answer)));
  CHECK(state.used_rationale_sentences.contains(first->rationale_sentence));

  // Only already-used answers: nothing accepted, rationale still consumed.
  ConversationState used(ContextDoc("Mary met John."));
  used.used_answers = {"mary", "john"};
  CHECK_FALSE(answer_unaware_step(used, params_p1(), stubs).has_value());
  CHECK(used.used_rationale_sentences == std::set<std::size_t>{0});
  CHECK_THROWS_AS(answer_unaware_step(used, params_p1(), stubs), ExhaustedError);
}

TEST_CASE("run_conversation: golden and invariants") {
  ServiceClients stubs = make_stub_suite(7);
  ContextDoc context(cohs::testing::read_text(cohs::testing::sample_context_path()));
  auto turns = run_conversation(context, 5, params_p1(), stubs);
  std::string json = conversation_json(turns, context);
  CHECK(json == cohs::testing::golden("sample_conversation.json", json));

  CHECK(turns.size() <= 5);
  CHECK_FALSE(turns.empty());
  std::set<std::string> answers;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    CHECK(turns[i].turn_id == static_cast<int>(i) + 1);
    CHECK(answers.insert(normalize_answer(turns[i].answer)).second);
    CHECK(filter_question(turns[i].question, turns[i].answer, context.raw_text(), stubs));
    std::size_t idx = locate_rationale(context, *turns[i].rationale_span);
    if (i > 0) CHECK(idx > prev);
    prev = idx;
  }

  CHECK(conversation_json(run_conversation(context, 5, params_p1(), stubs), context) == json);

  auto one = run_conversation(context, 1, params_p1(), stubs);
  REQUIRE(one.size() == 1);
  CHECK(one[0].question == turns[0].question);
  CHECK(one[0].answer == turns[0].answer);

  CHECK_THROWS_AS(run_conversation(context, 0, params_p1(), stubs), std::invalid_argument);
}

TEST_CASE("run_conversation: ablation switches") {
  ServiceClients stubs = make_stub_suite(7);
  ContextDoc context(cohs::testing::read_text(cohs::testing::sample_context_path()));
  auto filtered = run_conversation(context, 100, params_p1(), stubs);
  auto unfiltered = run_conversation(context, 100, params_p1(), stubs, {true, false});
  CHECK(unfiltered.size() >= filtered.size());

  auto no_ae = run_conversation(context, 3, params_p1(), stubs, {false, false});
  REQUIRE(no_ae.size() == 3);
  for (const auto& t : no_ae) CHECK(t.answer == t.rationale_text);
}

TEST_CASE("run_conversation: nothing to extract") {
  ServiceClients stubs = make_stub_suite(7);
  CHECK(run_conversation(ContextDoc("it was so."), 5, params_p1(), stubs).empty());
}

TEST_CASE("relevance from cached embeddings matches direct computation") {
  ServiceClients stubs = make_stub_suite(7);
  Conversation conv = fixture_conversation(0);
  ConversationEmbeddings cached = embed_conversation(conv, *stubs.embedder);
  for (int n = 1; n <= static_cast<int>(conv.turns.size()); ++n) {
    TurnTask task = make_answer_aware_task(conv, n);
    RelevanceMatrix direct = compute_relevance(task.context, task.history, *stubs.embedder);
    RelevanceMatrix reused = cached.relevance_for_turn(n);
    REQUIRE(direct.rows() == reused.rows());
    REQUIRE(direct.cols() == reused.cols());
    for (std::size_t i = 0; i < direct.rows(); ++i)
      for (std::size_t j = 0; j < direct.cols(); ++j) CHECK(direct.at(i, j) == reused.at(i, j));
  }
  CHECK_THROWS_AS(cached.relevance_for_turn(0), IndexError);
  CHECK_THROWS_AS(cached.relevance_for_turn(7), IndexError);
}
