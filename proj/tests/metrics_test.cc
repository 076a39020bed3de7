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

#include "cohs/metrics.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cohs/errors.h"
#include "doctest.h"
#include "test_support.h"

using namespace cohs;

namespace {

std::vector<Tokens> corpus(std::initializer_list<const char*> lines) {
  std::vector<Tokens> out;
  for (const char* l : lines) out.push_back(tokenize(l));
  return out;
}

void check_close(double got, double want) { CHECK(std::abs(got - want) <= 1e-9); }

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("The  Cat\tsat\n") == Tokens{"the", "cat", "sat"});
  CHECK(tokenize("   ").empty());
}

TEST_CASE("corpus_bleu: identical corpus") {
  BleuReport r = corpus_bleu(corpus({"a b c d"}), corpus({"a b c d"}));
  for (int n = 0; n < 4; ++n) CHECK(r.bleu[n] == 1.0);
  CHECK(r.brevity_penalty == 1.0);
  CHECK(r.hypothesis_length == 4);
  CHECK(r.reference_length == 4);
}

TEST_CASE("corpus_bleu: brevity penalty") {
  BleuReport r = corpus_bleu(corpus({"a b c d"}), corpus({"a b c"}));
  const double bp = std::exp(1.0 - 4.0 / 3.0);
  check_close(r.brevity_penalty, bp);
  CHECK(r.precision[0] == 1.0);
  check_close(r.b1(), bp);
  check_close(r.b1(), 0.7165313105737893);
  check_close(r.b2(), 0.7165313105737893);
  check_close(r.b3(), 0.7165313105737893);
  CHECK(r.b4() == 0.0);  // no 4-grams in the hypothesis
}

// Reference values from nltk.translate.bleu_score.corpus_bleu with default
// arguments; orders whose value nltk reports as ~1e-78 are 0 here.
TEST_CASE("corpus_bleu: reference values") {
  BleuReport mixed = corpus_bleu(
      corpus({"the cat sat on the mat", "there is a dog in the garden today"}),
      corpus({"the cat is on the mat", "a dog is in the garden"}));
  check_close(mixed.b1(), 0.7759415811497294);
  check_close(mixed.b2(), 0.6277676487487899);
  check_close(mixed.b3(), 0.43690312635089396);
  CHECK(mixed.b4() == 0.0);

  BleuReport shuffled = corpus_bleu(corpus({"the quick brown fox jumps over the lazy dog"}),
                                    corpus({"the quick brown dog jumps over the lazy fox"}));
  check_close(shuffled.b1(), 1.0);
  check_close(shuffled.b2(), 0.7905694150420948);
  check_close(shuffled.b3(), 0.644615994694649);
  check_close(shuffled.b4(), 0.45966135761245924);

  BleuReport clipped =
      corpus_bleu(corpus({"the cat is on the mat"}), corpus({"the the the the the the the"}));
  check_close(clipped.b1(), 2.0 / 7.0);
  CHECK(clipped.b2() == 0.0);
  CHECK(clipped.b4() == 0.0);
}

TEST_CASE("corpus_bleu: zero 4-gram matches") {
  BleuReport r = corpus_bleu(corpus({"a b c d e"}), corpus({"a b c x e"}));
  CHECK(r.b1() > 0.0);
  CHECK(r.b4() == 0.0);
}

TEST_CASE("corpus_bleu: errors") {
  CHECK_THROWS_AS(corpus_bleu({}, {}), EmptyCorpusError);
  CHECK_THROWS_AS(corpus_bleu(corpus({"a"}), corpus({"a", "b"})), std::invalid_argument);
  CHECK_THROWS_AS(corpus_bleu(corpus({"a"}), corpus({"a"}), 5), std::invalid_argument);
}

TEST_CASE("corpus_bleu: order 1 on single tokens is exact-match accuracy") {
  std::mt19937_64 rng(5);
  const char* vocab[] = {"red", "green", "blue", "black"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tokens> refs, hyps;
    int matches = 0;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      refs.push_back({vocab[rng() % 4]});
      hyps.push_back({vocab[rng() % 4]});
      matches += refs.back() == hyps.back();
    }
    check_close(corpus_bleu(refs, hyps, 1).b1(), static_cast<double>(matches) / n);
  }
}

TEST_CASE("rouge_l") {
  CHECK(rouge_l(tokenize("the cat sat"), tokenize("the cat")) == 0.8);
  CHECK(rouge_l(tokenize("a b c"), tokenize("a b c")) == 1.0);
  CHECK(rouge_l(tokenize("a b"), tokenize("c d")) == 0.0);
  CHECK(lcs_length(tokenize("a b c d"), tokenize("b d a c")) == 2);
  CHECK_THROWS_AS(rouge_l({}, tokenize("a")), EmptyInputError);
  CHECK_THROWS_AS(rouge_l(tokenize("a"), {}), EmptyInputError);
}

TEST_CASE("property: scores are bounded, self-scores are 1, rouge is symmetric") {
  std::mt19937_64 rng(11);
  const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  auto sentence = [&](std::size_t min_len) {
    Tokens t;
    std::size_t len = min_len + rng() % 8;
    for (std::size_t i = 0; i < len; ++i) t.push_back(vocab[rng() % 6]);
    return t;
  };
  for (int trial = 0; trial < 200; ++trial) {
    Tokens x = sentence(1), y = sentence(1);
    double f = rouge_l(x, y);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f == rouge_l(y, x));
    CHECK(rouge_l(x, x) == 1.0);

    BleuReport r = corpus_bleu({x}, {y});
    for (double b : r.bleu) {
      CHECK(std::isfinite(b));
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
    }
    Tokens long_x = sentence(4);
    BleuReport self = corpus_bleu({long_x}, {long_x});
    for (double b : self.bleu) check_close(b, 1.0);
  }
}

TEST_CASE("selection_stats") {
  auto fixture = load_coqa_file(cohs::testing::fixture_path());
  ServiceClients stubs = make_stub_suite(7);
  SelectionParams params;
  const double inf = std::numeric_limits<double>::infinity();
  auto rows = selection_stats(fixture, *stubs.embedder, params, {0.0, 1.0, 2.0, 5.0, inf});
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].avg_sentences + rows[i].avg_turns >=
          rows[i - 1].avg_sentences + rows[i - 1].avg_turns - 1e-12);
  }
  // Eligible turns: n >= 2 with a rationale, i.e. 4 + 3.
  CHECK(rows.back().samples == 7);
  CHECK(rows.back().fallbacks == 7);
  check_close(rows.back().avg_sentences, (4 * 9 + 3 * 6) / 7.0);
  check_close(rows.back().avg_turns, (1 + 2 + 3 + 4 + 1 + 2 + 4) / 7.0);

  SelectionStats single = selection_stats(fixture, *stubs.embedder, params);
  CHECK(single.p == 5.0);
  CHECK(single.samples == 7);

  std::vector<Conversation> first_turns_only;
  for (auto conv : fixture) {
    conv.turns.resize(1);
    first_turns_only.push_back(conv);
  }
  CHECK_THROWS_AS(selection_stats(first_turns_only, *stubs.embedder, params), EmptyCorpusError);
}

TEST_CASE("report formatting") {
  BleuReport r = corpus_bleu(corpus({"a b c d"}), corpus({"a b c d"}));
  CHECK(to_json(r).find("\"bleu1\"") != std::string::npos);
  SelectionStats s;
  s.p = std::numeric_limits<double>::infinity();
  s.avg_sentences = 9.0;
  s.avg_turns = 2.5;
  s.samples = 4;
  CHECK(to_json(std::vector<SelectionStats>{s}).find("\"inf\"") != std::string::npos);
  std::string table = format_stats_table({s});
  CHECK(table.find("inf") != std::string::npos);
  CHECK(table.find("9.00") != std::string::npos);
}
