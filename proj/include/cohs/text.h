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

// Small ASCII text helpers shared by the stubs, the pipeline and the metrics.

#ifndef COHS_TEXT_H_
#define COHS_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace cohs {

std::vector<std::string_view> split_whitespace(std::string_view text);
std::string to_lower(std::string_view text);

// Removes leading and trailing ASCII punctuation.
std::string_view strip_punctuation(std::string_view token);

// SQuAD-style answer normalization: lowercase, drop punctuation, drop the
// articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view text);

}  // namespace cohs

#endif  // COHS_TEXT_H_
