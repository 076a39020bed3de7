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

#include <stdexcept>

#include "cohs/errors.h"
#include "cohs/prompting.h"
#include "cohs/text.h"

namespace cohs {
namespace {

// Re-throws library errors with `where` prepended, keeping their type.
template <typename F>
auto in_context(const std::string& where, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ServiceUnavailable& e) {
    throw ServiceUnavailable(where + ": " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError(where + ": " + e.what());
  } catch (const LocateError& e) {
    throw LocateError(where + ": " + e.what());
  } catch (const IndexError& e) {
    throw IndexError(where + ": " + e.what());
  } catch (const EmptyWindowError& e) {
    throw EmptyWindowError(where + ": " + e.what());
  } catch (const DimError& e) {
    throw DimError(where + ": " + e.what());
  } catch (const ZeroVectorError& e) {
    throw ZeroVectorError(where + ": " + e.what());
  }
}

std::string turn_label(const TurnTask& task) {
  return "turn " + std::to_string(task.n);
}

}  // namespace

RelevanceMatrix compute_relevance(const ContextDoc& context,
                                  const std::vector<QATurn>& history,
                                  const Embedder& embedder) {
  std::vector<std::string> sentence_texts;
  sentence_texts.reserve(context.size());
  for (const auto& s : context.sentences()) sentence_texts.push_back(s.text);
  std::vector<std::string> turn_texts;
  turn_texts.reserve(history.size());
  for (const auto& t : history) turn_texts.push_back(turn_text(t.question, t.answer));

  auto sentence_embs = embedder.embed_batch(sentence_texts);
  auto turn_embs = embedder.embed_batch(turn_texts);
  return build_relevance_matrix(sentence_embs, turn_embs);
}

RelevanceMatrix ConversationEmbeddings::relevance_for_turn(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) > turns.size() + 1) {
    throw IndexError("turn " + std::to_string(n) + " out of range");
  }
  return build_relevance_matrix(
      sentences, std::span<const Embedding>(turns.data(), static_cast<std::size_t>(n - 1)));
}

ConversationEmbeddings embed_conversation(const Conversation& conv,
                                          const Embedder& embedder) {
  std::vector<std::string> sentence_texts;
  for (const auto& s : conv.context.sentences()) sentence_texts.push_back(s.text);
  std::vector<std::string> turn_texts;
  for (const auto& t : conv.turns) turn_texts.push_back(turn_text(t.question, t.answer));
  return {embedder.embed_batch(sentence_texts), embedder.embed_batch(turn_texts)};
}

TurnSelection select_turn(const TurnTask& task, const SelectionParams& params,
                          const Embedder& embedder) {
  if (!task.rationale_span) {
    throw LocateError(turn_label(task) + ": no rationale span");
  }
  return in_context(turn_label(task), [&] {
    TurnSelection out;
    out.rationale_sentence = locate_rationale(task.context, *task.rationale_span);
    out.relevance = compute_relevance(task.context, task.history, embedder);
    out.selection = select_for_turn(out.relevance, out.rationale_sentence, params);
    return out;
  });
}

AnswerAwareResult answer_aware_generate(const TurnTask& task,
                                        const SelectionParams& params,
                                        const ServiceClients& clients) {
  if (task.mode != TaskMode::kAnswerAware || !task.target_answer ||
      !task.rationale_text) {
    throw std::invalid_argument(turn_label(task) +
                                ": answer-aware generation needs an answer and a rationale");
  }
  AnswerAwareResult out;
  out.selection = select_turn(task, params, *clients.embedder);
  out.prompt = in_context(turn_label(task), [&] {
    return assemble_prompt(make_prompt_spec(task.context, task.history,
                                            out.selection.selection,
                                            *task.target_answer,
                                            *task.rationale_text));
  });
  out.question = in_context(turn_label(task),
                            [&] { return clients.generator->generate(out.prompt); });
  return out;
}

std::size_t select_next_rationale(const ConversationState& state) {
  for (std::size_t i = 0; i < state.context.size(); ++i) {
    if (!state.used_rationale_sentences.contains(i)) return i;
  }
  throw ExhaustedError("every sentence has been used as a rationale");
}

CandidateAnswers extract_candidate_answers(const ConversationState& state,
                                           std::size_t rationale_sentence,
                                           const ServiceClients& clients) {
  if (rationale_sentence >= state.context.size()) {
    throw IndexError("rationale sentence " + std::to_string(rationale_sentence) +
                     " out of range");
  }
  CandidateAnswers out{rationale_sentence, {}};
  std::set<std::string> seen = state.used_answers;
  for (auto& span :
       clients.extractor->extract_spans(state.context.sentence(rationale_sentence).text)) {
    if (seen.insert(normalize_answer(span)).second) out.spans.push_back(std::move(span));
  }
  return out;
}

FilterVerdict filter_question(const std::string& question,
                              const std::string& answer,
                              const std::string& context_text,
                              const ServiceClients& clients) {
  if (question.empty() || answer.empty()) {
    throw std::invalid_argument("filter_question needs a question and an answer");
  }
  FilterVerdict verdict;
  verdict.predicted = clients.qa->answer(question, context_text);
  verdict.accepted = normalize_answer(verdict.predicted) == normalize_answer(answer);
  if (!verdict.accepted) verdict.reason = "answer-mismatch";
  return verdict;
}

std::optional<GeneratedTurn> answer_unaware_step(ConversationState& state,
                                                 const SelectionParams& params,
                                                 const ServiceClients& clients,
                                                 const PipelineOptions& options) {
  const std::size_t idx = select_next_rationale(state);
  const Sentence& rationale = state.context.sentence(idx);
  state.used_rationale_sentences.insert(idx);

  std::vector<std::string> candidates;
  if (options.use_extractor) {
    candidates = extract_candidate_answers(state, idx, clients).spans;
  } else if (!state.used_answers.contains(normalize_answer(rationale.text))) {
    candidates.push_back(rationale.text);
  }

  for (const auto& candidate : candidates) {
    TurnTask task{state.context, state.generated_turns};
    task.mode = TaskMode::kAnswerAware;
    task.target_answer = candidate;
    task.rationale_text = rationale.text;
    task.rationale_span = rationale.span;
    task.n = static_cast<int>(state.generated_turns.size()) + 1;

    std::string question = answer_aware_generate(task, params, clients).question;
    if (options.use_filter &&
        !filter_question(question, candidate, state.context.raw_text(), clients)) {
      continue;
    }

    QATurn turn;
    turn.turn_id = task.n;
    turn.question = question;
    turn.answer = candidate;
    turn.rationale_text = rationale.text;
    turn.rationale_span = rationale.span;
    state.generated_turns.push_back(std::move(turn));
    state.used_answers.insert(normalize_answer(candidate));
    return GeneratedTurn{std::move(question), candidate, idx};
  }
  return std::nullopt;
}

std::vector<QATurn> run_conversation(const ContextDoc& context, int max_turns,
                                     const SelectionParams& params,
                                     const ServiceClients& clients,
                                     const PipelineOptions& options) {
  if (max_turns < 1) throw std::invalid_argument("max_turns must be >= 1");
  ConversationState state(context);
  while (state.generated_turns.size() < static_cast<std::size_t>(max_turns)) {
    try {
      answer_unaware_step(state, params, clients, options);
    } catch (const ExhaustedError&) {
      break;
    }
  }
  return std::move(state.generated_turns);
}

}  // namespace cohs
