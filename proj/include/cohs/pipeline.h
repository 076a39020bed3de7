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

// Answer-aware generation and the answer-unaware conversation loop
// (extract answer -> select -> generate -> filter).

#ifndef COHS_PIPELINE_H_
#define COHS_PIPELINE_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cohs/corpus.h"
#include "cohs/relevance.h"
#include "cohs/selector.h"
#include "cohs/services.h"

namespace cohs {

// Embeds every context sentence and every history turn and builds T.
RelevanceMatrix compute_relevance(const ContextDoc& context,
                                  const std::vector<QATurn>& history,
                                  const Embedder& embedder);

// Sentence and turn embeddings of one conversation, computed once and reused
// for every turn.
struct ConversationEmbeddings {
  std::vector<Embedding> sentences;
  std::vector<Embedding> turns;

  // T for turn n (history = turns 1..n-1).
  RelevanceMatrix relevance_for_turn(int n) const;
};

ConversationEmbeddings embed_conversation(const Conversation& conv,
                                          const Embedder& embedder);

struct TurnSelection {
  std::size_t rationale_sentence = 0;  // c_s
  RelevanceMatrix relevance;
  Selection selection;
};

// Locates the rationale of an answer-aware task and runs the selector.
TurnSelection select_turn(const TurnTask& task, const SelectionParams& params,
                          const Embedder& embedder);

struct AnswerAwareResult {
  TurnSelection selection;
  std::string prompt;
  std::string question;  // raw generator output
};

AnswerAwareResult answer_aware_generate(const TurnTask& task,
                                        const SelectionParams& params,
                                        const ServiceClients& clients);

struct ConversationState {
  explicit ConversationState(ContextDoc doc) : context(std::move(doc)) {}

  ContextDoc context;
  std::vector<QATurn> generated_turns;
  std::set<std::size_t> used_rationale_sentences;
  std::set<std::string> used_answers;  // normalized
};

struct CandidateAnswers {
  std::size_t rationale_sentence = 0;
  std::vector<std::string> spans;
};

// Earliest sentence not yet used as a rationale. Throws ExhaustedError.
std::size_t select_next_rationale(const ConversationState& state);

// Extractor spans for the sentence minus answers already given (compared
// after normalize_answer), in extractor order.
CandidateAnswers extract_candidate_answers(const ConversationState& state,
                                           std::size_t rationale_sentence,
                                           const ServiceClients& clients);

struct FilterVerdict {
  bool accepted = false;
  std::string predicted;
  std::string reason;  // empty when accepted

  explicit operator bool() const { return accepted; }
};

// Accepts the question when the QA model's answer over context_text equals
// the target answer after normalize_answer.
FilterVerdict filter_question(const std::string& question,
                              const std::string& answer,
                              const std::string& context_text,
                              const ServiceClients& clients);

struct PipelineOptions {
  bool use_extractor = true;  // false: the rationale sentence is the answer
  bool use_filter = true;     // false: accept the first generated question
};

struct GeneratedTurn {
  std::string question;
  std::string answer;
  std::size_t rationale_sentence = 0;

  friend bool operator==(const GeneratedTurn&, const GeneratedTurn&) = default;
};

// One rationale sentence's worth of work. Returns the first accepted turn
// and records it in state, or nullopt when every candidate was rejected. The
// rationale is marked used either way. Throws ExhaustedError.
std::optional<GeneratedTurn> answer_unaware_step(ConversationState& state,
                                                 const SelectionParams& params,
                                                 const ServiceClients& clients,
                                                 const PipelineOptions& options = {});

// Steps until max_turns turns are accepted or the rationales run out.
std::vector<QATurn> run_conversation(const ContextDoc& context, int max_turns,
                                     const SelectionParams& params,
                                     const ServiceClients& clients,
                                     const PipelineOptions& options = {});

}  // namespace cohs

#endif  // COHS_PIPELINE_H_
