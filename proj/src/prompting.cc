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

#include "cohs/errors.h"
#include "cohs/relevance.h"

namespace cohs {

std::string serialize_history(const std::vector<QAPair>& turns) {
  std::string out;
  for (const auto& [q, a] : turns) {
    if (!out.empty()) out += ' ';
    out += turn_text(q, a);
  }
  return out;
}

std::string assemble_prompt(const PromptSpec& spec) {
  if (spec.window.empty()) throw EmptyWindowError("prompt window is empty");
  std::string out = "Answer: " + spec.answer + ", " + spec.rationale + " Context:";
  for (const auto& sentence : spec.window) {
    out += ' ';
    out += sentence;
  }
  if (!spec.history.empty()) {
    out += " [SEP] ";
    out += serialize_history(spec.history);
  }
  return out;
}

PromptSpec make_prompt_spec(const ContextDoc& context,
                            const std::vector<QATurn>& history,
                            const Selection& selection, std::string answer,
                            std::string rationale) {
  if (selection.window_end() > context.size() || selection.k > history.size()) {
    throw IndexError("selection " + describe(selection) +
                     " does not fit the context/history");
  }
  PromptSpec spec;
  spec.answer = std::move(answer);
  spec.rationale = std::move(rationale);
  for (std::size_t i = selection.window_start; i < selection.window_end(); ++i) {
    spec.window.push_back(context.sentence(i).text);
  }
  for (std::size_t j = history.size() - selection.k; j < history.size(); ++j) {
    spec.history.emplace_back(history[j].question, history[j].answer);
  }
  return spec;
}

}  // namespace cohs
