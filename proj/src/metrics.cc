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
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cohs/errors.h"
#include "cohs/pipeline.h"
#include "cohs/text.h"
#include "json.hpp"

namespace cohs {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                    tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << p;
  return os.str();
}

struct EligibleTurn {
  RelevanceMatrix relevance;
  std::size_t rationale_sentence;
};

std::vector<EligibleTurn> eligible_turns(const std::vector<Conversation>& corpus,
                                         const Embedder& embedder) {
  std::vector<EligibleTurn> out;
  for (const auto& conv : corpus) {
    if (conv.turns.size() < 2) continue;
    const ConversationEmbeddings embs = embed_conversation(conv, embedder);

    for (std::size_t n = 2; n <= conv.turns.size(); ++n) {
      const QATurn& target = conv.turns[n - 1];
      if (!target.rationale_span) continue;
      std::size_t c_s;
      try {
        c_s = locate_rationale(conv.context, *target.rationale_span);
      } catch (const LocateError&) {
        continue;
      }
      out.push_back({embs.relevance_for_turn(static_cast<int>(n)), c_s});
    }
  }
  return out;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  const std::string lowered = to_lower(text);
  for (std::string_view w : split_whitespace(lowered)) out.emplace_back(w);
  return out;
}

BleuReport corpus_bleu(const std::vector<Tokens>& references,
                       const std::vector<Tokens>& hypotheses, int max_n) {
  if (references.size() != hypotheses.size()) {
    throw std::invalid_argument("corpus_bleu: " + std::to_string(references.size()) +
                                " references vs " + std::to_string(hypotheses.size()) +
                                " hypotheses");
  }
  if (references.empty()) throw EmptyCorpusError("corpus_bleu: empty corpus");
  if (max_n < 1 || max_n > 4) throw std::invalid_argument("max_n must be in 1..4");

  std::size_t matched[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  BleuReport report;
  for (std::size_t s = 0; s < references.size(); ++s) {
    const Tokens& ref = references[s];
    const Tokens& hyp = hypotheses[s];
    report.hypothesis_length += hyp.size();
    report.reference_length += ref.size();
    for (int n = 1; n <= max_n; ++n) {
      const NgramCounts hyp_counts = count_ngrams(hyp, static_cast<std::size_t>(n));
      const NgramCounts ref_counts = count_ngrams(ref, static_cast<std::size_t>(n));
      std::size_t hyp_total = 0;
      for (const auto& [gram, count] : hyp_counts) {
        hyp_total += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched[n - 1] += std::min(count, it->second);
      }
      total[n - 1] += std::max<std::size_t>(1, hyp_total);
    }
  }

  const double c = static_cast<double>(report.hypothesis_length);
  const double r = static_cast<double>(report.reference_length);
  if (c == 0.0) {
    report.brevity_penalty = 0.0;
  } else if (c > r) {
    report.brevity_penalty = 1.0;
  } else {
    report.brevity_penalty = std::exp(1.0 - r / c);
  }

  double log_sum = 0.0;
  bool zero = false;
  for (int n = 1; n <= max_n; ++n) {
    report.precision[n - 1] =
        static_cast<double>(matched[n - 1]) / static_cast<double>(total[n - 1]);
    if (matched[n - 1] == 0) zero = true;
    if (!zero) log_sum += std::log(report.precision[n - 1]);
    report.bleu[n - 1] =
        zero ? 0.0 : report.brevity_penalty * std::exp(log_sum / static_cast<double>(n));
  }
  return report;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const Tokens& reference, const Tokens& hypothesis) {
  if (reference.empty() || hypothesis.empty()) {
    throw EmptyInputError("rouge_l: empty reference or hypothesis");
  }
  const std::size_t l = lcs_length(reference, hypothesis);
  if (l == 0) return 0.0;
  return 2.0 * static_cast<double>(l) /
         static_cast<double>(reference.size() + hypothesis.size());
}

SelectionStats selection_stats(const std::vector<Conversation>& corpus,
                               const Embedder& embedder,
                               const SelectionParams& params) {
  return selection_stats(corpus, embedder, params, {params.p}).front();
}

std::vector<SelectionStats> selection_stats(const std::vector<Conversation>& corpus,
                                            const Embedder& embedder,
                                            const SelectionParams& params,
                                            const std::vector<double>& thresholds) {
  const auto turns = eligible_turns(corpus, embedder);
  if (turns.empty()) throw EmptyCorpusError("no turn with history and a rationale");

  std::vector<SelectionStats> rows;
  for (double p : thresholds) {
    SelectionParams run = params;
    run.p = p;
    SelectionStats row;
    row.p = p;
    row.mode = params.mode;
    double sentences = 0.0;
    double history = 0.0;
    for (const auto& turn : turns) {
      Selection s = select_for_turn(turn.relevance, turn.rationale_sentence, run);
      sentences += static_cast<double>(s.u);
      history += static_cast<double>(s.k);
      if (s.fallback) ++row.fallbacks;
    }
    row.samples = turns.size();
    row.avg_sentences = sentences / static_cast<double>(turns.size());
    row.avg_turns = history / static_cast<double>(turns.size());
    rows.push_back(row);
  }
  return rows;
}

std::string to_json(const BleuReport& report) {
  nlohmann::ordered_json doc;
  for (int n = 0; n < 4; ++n) doc["bleu" + std::to_string(n + 1)] = report.bleu[n];
  doc["precisions"] = {report.precision[0], report.precision[1], report.precision[2],
                       report.precision[3]};
  doc["brevity_penalty"] = report.brevity_penalty;
  doc["hyp_len"] = report.hypothesis_length;
  doc["ref_len"] = report.reference_length;
  return doc.dump();
}

std::string to_json(const std::vector<SelectionStats>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    if (std::isinf(row.p)) {
      r["p"] = "inf";
    } else {
      r["p"] = row.p;
    }
    r["mode"] = std::string(to_string(row.mode));
    r["avg_sentences"] = row.avg_sentences;
    r["avg_turns"] = row.avg_turns;
    r["samples"] = row.samples;
    r["fallbacks"] = row.fallbacks;
    doc.push_back(std::move(r));
  }
  return doc.dump();
}

std::string format_stats_table(const std::vector<SelectionStats>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "p" << std::right << std::setw(10) << "avg #S"
     << std::setw(10) << "avg #P" << std::setw(10) << "samples" << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto& row : rows) {
    os << std::left << std::setw(8) << format_p(row.p) << std::right
       << std::setw(10) << row.avg_sentences << std::setw(10) << row.avg_turns
       << std::setw(10) << row.samples << '\n';
  }
  return os.str();
}

}  // namespace cohs
