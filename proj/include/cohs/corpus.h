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

// Contexts, conversations and rationales, plus CoQA ingestion.
//
// All offsets in this module are byte offsets into the UTF-8 context text.
// CoQA stores code-point offsets; parse_coqa() and to_coqa_json() convert.

#ifndef COHS_CORPUS_H_
#define COHS_CORPUS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cohs {

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t length() const { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  CharSpan span;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// A context segmented into sentences. Immutable once built.
class ContextDoc {
 public:
  // Segments raw_text with split_sentences(). Throws EmptyContextError.
  explicit ContextDoc(std::string raw_text);

  const std::string& raw_text() const { return raw_text_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const Sentence& sentence(std::size_t i) const { return sentences_.at(i); }
  std::size_t size() const { return sentences_.size(); }

 private:
  std::string raw_text_;
  std::vector<Sentence> sentences_;
};

struct QATurn {
  int turn_id = 1;
  std::string question;
  std::string answer;
  std::string rationale_text;
  std::optional<CharSpan> rationale_span;

  friend bool operator==(const QATurn&, const QATurn&) = default;
};

struct Conversation {
  std::string id;
  ContextDoc context;
  std::vector<QATurn> turns;
};

enum class TaskMode { kAnswerAware, kAnswerUnaware };

// Input for generating turn n: the context, the turns before n and, in the
// answer-aware mode, the target answer with its rationale.
struct TurnTask {
  TurnTask(ContextDoc doc, std::vector<QATurn> turns)
      : context(std::move(doc)), history(std::move(turns)) {}

  ContextDoc context;
  std::vector<QATurn> history;
  TaskMode mode = TaskMode::kAnswerAware;
  std::optional<std::string> target_answer;
  std::optional<std::string> rationale_text;
  std::optional<CharSpan> rationale_span;
  int n = 1;
};

// Builds the answer-aware task for turn n of conv. Throws IndexError when n
// is not a turn of conv and LocateError when the turn has no rationale span.
TurnTask make_answer_aware_task(const Conversation& conv, int n);

// Rule-based segmentation: a sentence ends after '.', '!' or '?' when the
// next character is whitespace (or the text ends), unless the token ending
// there is a known abbreviation. Sentences are trimmed of whitespace.
std::vector<Sentence> split_sentences(std::string_view raw_text);

// Abbreviations that never end a sentence.
const std::vector<std::string_view>& sentence_abbreviations();

// Parses a CoQA document: either {"data": [...]} or a bare array of records.
// Throws ParseError on malformed JSON and SchemaError on structural problems.
std::vector<Conversation> parse_coqa(std::string_view json_text);
std::vector<Conversation> load_coqa_file(const std::string& path);

// Serializes conversations back into the CoQA schema.
std::string to_coqa_json(const std::vector<Conversation>& conversations);

// Index of the sentence overlapping span the most; ties go to the smaller
// index. Throws LocateError when nothing overlaps or the span is invalid.
std::size_t locate_rationale(const ContextDoc& context, CharSpan span);

// Turns 1..n-1 of conv. Throws IndexError unless 1 <= n <= |turns| + 1.
std::vector<QATurn> history_prefix(const Conversation& conv, int n);

// Code-point <-> byte offset conversion for UTF-8 text. Offsets past the end
// clamp to the text length.
std::size_t codepoint_to_byte(std::string_view text, std::size_t codepoint);
std::size_t byte_to_codepoint(std::string_view text, std::size_t byte);

}  // namespace cohs

#endif  // COHS_CORPUS_H_
