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

#ifndef COHS_METRICS_H_
#define COHS_METRICS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cohs/corpus.h"
#include "cohs/selector.h"
#include "cohs/services.h"

namespace cohs {

using Tokens = std::vector<std::string>;

// Lowercase, then split on whitespace.
Tokens tokenize(std::string_view text);

struct BleuReport {
  // Cumulative BLEU-n with uniform weights over orders 1..n.
  double bleu[4] = {0.0, 0.0, 0.0, 0.0};
  // Clipped n-gram precision per order.
  double precision[4] = {0.0, 0.0, 0.0, 0.0};
  double brevity_penalty = 0.0;
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;

  double b1() const { return bleu[0]; }
  double b2() const { return bleu[1]; }
  double b3() const { return bleu[2]; }
  double b4() const { return bleu[3]; }
};

// Corpus BLEU with one reference per hypothesis, unsmoothed: counts are
// pooled over the corpus, and a segment with no n-grams of some order still
// contributes a denominator of 1 for that order. An order with zero matches
// makes every cumulative score from that order on 0. Throws EmptyCorpusError
// or std::invalid_argument on a length mismatch.
BleuReport corpus_bleu(const std::vector<Tokens>& references,
                       const std::vector<Tokens>& hypotheses, int max_n = 4);

// Longest common subsequence length.
std::size_t lcs_length(const Tokens& a, const Tokens& b);

// ROUGE-L F1 = 2L / (|ref| + |hyp|). Throws EmptyInputError.
double rouge_l(const Tokens& reference, const Tokens& hypothesis);

struct SelectionStats {
  double p = 0.0;
  SelectionMode mode = SelectionMode::kCohs;
  double avg_sentences = 0.0;
  double avg_turns = 0.0;
  std::size_t samples = 0;
  std::size_t fallbacks = 0;
};

// Runs the selector on every turn with a non-empty history and a locatable
// rationale and averages u and k. Throws EmptyCorpusError when no turn is
// eligible.
SelectionStats selection_stats(const std::vector<Conversation>& corpus,
                               const Embedder& embedder,
                               const SelectionParams& params);

// One row per threshold; embeddings are computed once for all of them.
std::vector<SelectionStats> selection_stats(const std::vector<Conversation>& corpus,
                                            const Embedder& embedder,
                                            const SelectionParams& params,
                                            const std::vector<double>& thresholds);

std::string to_json(const BleuReport& report);
std::string to_json(const std::vector<SelectionStats>& rows);

// Aligned text table with columns p, avg #S, avg #P.
std::string format_stats_table(const std::vector<SelectionStats>& rows);

}  // namespace cohs

#endif  // COHS_METRICS_H_
