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

#include "cohs/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cohs/errors.h"
#include "json.hpp"

namespace cohs {
namespace {

using nlohmann::json;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_opening_punct(char c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{';
}

// The whitespace-delimited token ending at `last` (inclusive), without
// leading quotes or brackets.
std::string_view token_ending_at(std::string_view text, std::size_t last) {
  std::size_t begin = last;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  while (begin < last && is_opening_punct(text[begin])) ++begin;
  return text.substr(begin, last - begin + 1);
}

bool is_abbreviation(std::string_view token) {
  const auto& abbrevs = sentence_abbreviations();
  return std::find(abbrevs.begin(), abbrevs.end(), token) != abbrevs.end();
}

bool is_continuation_byte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

Conversation parse_record(const json& record, std::size_t position) {
  if (!record.is_object()) {
    throw SchemaError("record " + std::to_string(position) +
                      ": expected an object");
  }
  std::string id = record.contains("id") && record["id"].is_string()
                       ? record["id"].get<std::string>()
                       : "#" + std::to_string(position);
  const std::string where = "conversation " + id;

  try {
    std::string story = require(record, "story", where).get<std::string>();
    const json& questions = require(record, "questions", where);
    const json& answers = require(record, "answers", where);
    if (!questions.is_array() || !answers.is_array()) {
      throw SchemaError(where + ": questions/answers must be arrays");
    }

    std::map<int, const json*> q_by_turn;
    std::map<int, const json*> a_by_turn;
    for (const auto& q : questions) {
      int turn = require(q, "turn_id", where).get<int>();
      if (!q_by_turn.emplace(turn, &q).second) {
        throw SchemaError(where + ": duplicate question turn_id " +
                          std::to_string(turn));
      }
    }
    for (const auto& a : answers) {
      int turn = require(a, "turn_id", where).get<int>();
      if (!a_by_turn.emplace(turn, &a).second) {
        throw SchemaError(where + ": duplicate answer turn_id " +
                          std::to_string(turn));
      }
    }
    for (const auto& [turn, q] : q_by_turn) {
      if (!a_by_turn.contains(turn)) {
        throw SchemaError(where + ": question turn_id " + std::to_string(turn) +
                          " has no answer");
      }
    }
    for (const auto& [turn, a] : a_by_turn) {
      if (!q_by_turn.contains(turn)) {
        throw SchemaError(where + ": answer turn_id " + std::to_string(turn) +
                          " has no question");
      }
    }

    ContextDoc context(story);
    const std::string& raw = context.raw_text();
    const std::size_t story_codepoints = byte_to_codepoint(raw, raw.size());

    std::vector<QATurn> turns;
    int expected = 1;
    for (const auto& [turn, q] : q_by_turn) {
      if (turn != expected) {
        throw SchemaError(where + ": turn_ids must run 1..N, found " +
                          std::to_string(turn) + " where " +
                          std::to_string(expected) + " was expected");
      }
      ++expected;
      const json& a = *a_by_turn.at(turn);
      QATurn t;
      t.turn_id = turn;
      t.question = require(*q, "input_text", where).get<std::string>();
      t.answer = require(a, "input_text", where).get<std::string>();
      t.rationale_text = a.value("span_text", std::string());
      long long start = a.value("span_start", -1LL);
      long long end = a.value("span_end", -1LL);
      if (start >= 0 && end > start) {
        if (static_cast<std::size_t>(end) > story_codepoints) {
          throw SchemaError(where + ": turn " + std::to_string(turn) +
                            " rationale span exceeds the story");
        }
        t.rationale_span =
            CharSpan{codepoint_to_byte(raw, static_cast<std::size_t>(start)),
                     codepoint_to_byte(raw, static_cast<std::size_t>(end))};
      }
      turns.push_back(std::move(t));
    }
    return Conversation{std::move(id), std::move(context), std::move(turns)};
  } catch (const json::exception& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const EmptyContextError&) {
    throw SchemaError(where + ": empty story");
  }
}

}  // namespace

const std::vector<std::string_view>& sentence_abbreviations() {
  static const std::vector<std::string_view> kAbbreviations = {
      "Mr.", "Mrs.", "Ms.", "Dr.", "St.", "vs.", "e.g.", "i.e.", "U.S."};
  return kAbbreviations;
}

std::vector<Sentence> split_sentences(std::string_view raw_text) {
  std::vector<Sentence> out;
  const std::size_t n = raw_text.size();

  auto skip_space = [&](std::size_t i) {
    while (i < n && is_space(raw_text[i])) ++i;
    return i;
  };
  auto emit = [&](std::size_t begin, std::size_t end) {
    out.push_back(Sentence{out.size(),
                           std::string(raw_text.substr(begin, end - begin)),
                           CharSpan{begin, end}});
  };

  std::size_t start = skip_space(0);
  for (std::size_t i = start; i < n; ++i) {
    if (!is_terminator(raw_text[i])) continue;
    if (i + 1 < n && !is_space(raw_text[i + 1])) continue;
    if (is_abbreviation(token_ending_at(raw_text, i))) continue;
    emit(start, i + 1);
    start = skip_space(i + 1);
    i = start - 1;  // loop increment lands on start
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && is_space(raw_text[end - 1])) --end;
    if (end > start) emit(start, end);
  }
  if (out.empty()) throw EmptyContextError("context has no non-whitespace text");
  return out;
}

ContextDoc::ContextDoc(std::string raw_text)
    : raw_text_(std::move(raw_text)), sentences_(split_sentences(raw_text_)) {}

std::size_t codepoint_to_byte(std::string_view text, std::size_t codepoint) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_continuation_byte(text[i])) continue;
    if (seen == codepoint) return i;
    ++seen;
  }
  return text.size();
}

std::size_t byte_to_codepoint(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < byte; ++i) {
    if (!is_continuation_byte(text[i])) ++count;
  }
  return count;
}

std::vector<Conversation> parse_coqa(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed CoQA JSON: ") + e.what());
  }
  const json* records = &doc;
  if (doc.is_object()) {
    auto it = doc.find("data");
    if (it == doc.end()) throw SchemaError("CoQA document has no \"data\" array");
    records = &*it;
  }
  if (!records->is_array()) throw SchemaError("CoQA \"data\" must be an array");

  std::vector<Conversation> out;
  out.reserve(records->size());
  for (std::size_t i = 0; i < records->size(); ++i) {
    out.push_back(parse_record((*records)[i], i));
  }
  return out;
}

std::vector<Conversation> load_coqa_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_coqa(buffer.str());
}

std::string to_coqa_json(const std::vector<Conversation>& conversations) {
  nlohmann::ordered_json data = nlohmann::ordered_json::array();
  for (const auto& conv : conversations) {
    const std::string& raw = conv.context.raw_text();
    nlohmann::ordered_json questions = nlohmann::ordered_json::array();
    nlohmann::ordered_json answers = nlohmann::ordered_json::array();
    for (const auto& t : conv.turns) {
      questions.push_back({{"input_text", t.question}, {"turn_id", t.turn_id}});
      long long start = -1;
      long long end = -1;
      if (t.rationale_span) {
        start = static_cast<long long>(byte_to_codepoint(raw, t.rationale_span->start));
        end = static_cast<long long>(byte_to_codepoint(raw, t.rationale_span->end));
      }
      answers.push_back({{"input_text", t.answer},
                         {"span_text", t.rationale_text},
                         {"span_start", start},
                         {"span_end", end},
                         {"turn_id", t.turn_id}});
    }
    data.push_back({{"id", conv.id},
                    {"story", raw},
                    {"questions", std::move(questions)},
                    {"answers", std::move(answers)}});
  }
  nlohmann::ordered_json doc = {{"version", "1.0"}, {"data", std::move(data)}};
  return doc.dump(2);
}

std::size_t locate_rationale(const ContextDoc& context, CharSpan span) {
  if (span.start >= span.end || span.end > context.raw_text().size()) {
    throw LocateError("invalid rationale span [" + std::to_string(span.start) +
                      ", " + std::to_string(span.end) + ")");
  }
  std::size_t best = 0;
  std::size_t best_overlap = 0;
  for (const auto& s : context.sentences()) {
    std::size_t lo = std::max(s.span.start, span.start);
    std::size_t hi = std::min(s.span.end, span.end);
    std::size_t overlap = hi > lo ? hi - lo : 0;
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = s.index;
    }
  }
  if (best_overlap == 0) {
    throw LocateError("rationale span [" + std::to_string(span.start) + ", " +
                      std::to_string(span.end) + ") overlaps no sentence");
  }
  return best;
}

std::vector<QATurn> history_prefix(const Conversation& conv, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > conv.turns.size() + 1) {
    throw IndexError("turn " + std::to_string(n) + " out of range for " +
                     conv.id + " with " + std::to_string(conv.turns.size()) +
                     " turns");
  }
  return {conv.turns.begin(), conv.turns.begin() + (n - 1)};
}

TurnTask make_answer_aware_task(const Conversation& conv, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > conv.turns.size()) {
    throw IndexError("turn " + std::to_string(n) + " is not a turn of " +
                     conv.id);
  }
  const QATurn& target = conv.turns[static_cast<std::size_t>(n - 1)];
  if (!target.rationale_span) {
    throw LocateError(conv.id + " turn " + std::to_string(n) +
                      " has no rationale span");
  }
  TurnTask task{conv.context, history_prefix(conv, n)};
  task.mode = TaskMode::kAnswerAware;
  task.target_answer = target.answer;
  task.rationale_text = target.rationale_text;
  task.rationale_span = target.rationale_span;
  task.n = n;
  return task;
}

}  // namespace cohs
