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

#ifndef COHS_PROMPTING_H_
#define COHS_PROMPTING_H_

#include <string>
#include <utility>
#include <vector>

#include "cohs/corpus.h"
#include "cohs/selector.h"

namespace cohs {

using QAPair = std::pair<std::string, std::string>;

struct PromptSpec {
  std::string answer;
  std::string rationale;
  std::vector<std::string> window;  // selected sentences, in context order
  std::vector<QAPair> history;      // selected turns, oldest first
};

// "q a" per turn, oldest first, joined by single spaces. Empty answers drop
// their separator.
std::string serialize_history(const std::vector<QAPair>& turns);

// "Answer: {a}, {r} Context: {window} [SEP] {history}". The " [SEP] ..."
// tail is omitted when the history is empty. Throws EmptyWindowError.
std::string assemble_prompt(const PromptSpec& spec);

// Fills a PromptSpec from a selection over context/history.
PromptSpec make_prompt_spec(const ContextDoc& context,
                            const std::vector<QATurn>& history,
                            const Selection& selection, std::string answer,
                            std::string rationale);

}  // namespace cohs

#endif  // COHS_PROMPTING_H_
