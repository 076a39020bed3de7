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

// Joint top-p selection of a context window and a history suffix.
//
// Given the relevance matrix T (rows: context sentences, columns: history
// turns, oldest first) the selector picks a contiguous sentence window that
// contains the rationale sentence c_s and a suffix of the history that ends
// at the most recent turn, such that the summed relevance over the selected
// block reaches the threshold p while u + k (window length plus suffix
// length) is as small as possible.
//
// Among blocks of equal u + k the one with the larger sum wins, then the
// shorter suffix, then the earlier window. Sums closer than kTieTolerance
// count as equal. When no block reaches p the selection falls back to the
// whole context and the whole history.
//
// The dyn-CS variant freezes the suffix at the last k_fixed turns and only
// shrinks the context; dyn-HS keeps the full context and only shrinks the
// history. p == 0 is special-cased for both: dyn-CS returns the rationale
// sentence alone and dyn-HS returns an empty history.

#ifndef COHS_SELECTOR_H_
#define COHS_SELECTOR_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohs/relevance.h"

namespace cohs {

inline constexpr double kThresholdSlack = 1e-9;
inline constexpr double kTieTolerance = 1e-12;

enum class SelectionMode { kCohs, kDynCs, kDynHs, kStatic };

std::string_view to_string(SelectionMode mode);
// Accepts "cohs", "dyn_cs", "dyn_hs", "static". Throws std::invalid_argument.
SelectionMode parse_selection_mode(std::string_view name);

struct SelectionParams {
  double p = 5.0;  // +infinity selects everything
  SelectionMode mode = SelectionMode::kCohs;
  int k_fixed = 3;

  // Throws std::invalid_argument for NaN/negative p or k_fixed < 1.
  void validate() const;
};

struct Selection {
  std::size_t window_start = 0;
  std::size_t u = 0;  // number of sentences in the window
  std::size_t k = 0;  // number of most recent history turns
  double achieved_sum = 0.0;
  bool fallback = false;

  std::size_t window_end() const { return window_start + u; }
  friend bool operator==(const Selection&, const Selection&) = default;
};

std::string describe(const Selection& s);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

// (m+1) x (h+1) cumulative sums; entry (i, j) is the sum of the top-left
// i x j block of T.
class PrefixSumTable {
 public:
  explicit PrefixSumTable(const RelevanceMatrix& t);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const {
    return table_[i * (cols_ + 1) + j];
  }

  // Sum of T over rows x cols. Throws IndexError on an invalid range.
  double window_sum(IndexRange rows, IndexRange cols) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> table_;
};

inline PrefixSumTable prefix_sums(const RelevanceMatrix& t) {
  return PrefixSumTable(t);
}
inline double window_sum(const PrefixSumTable& p, IndexRange rows,
                         IndexRange cols) {
  return p.window_sum(rows, cols);
}

// Throws EmptyHistoryError when T has no columns and IndexError for c_s.
Selection cohs_select(const RelevanceMatrix& t, std::size_t c_s, double p);
Selection dyn_cs_select(const RelevanceMatrix& t, std::size_t c_s, double p,
                        int k_fixed);
Selection dyn_hs_select(const RelevanceMatrix& t, double p);

// Five sentences around the 1-based rationale sentence s; all sentences when
// m <= 5. The returned range is 0-based. Throws IndexError unless 1 <= s <= m.
IndexRange static_five_window(std::size_t m, std::size_t s);

// Exhaustive reference for cohs/dyn_cs/dyn_hs, summing every candidate block
// cell by cell. Returns exactly what the fast path returns.
Selection oracle_select(const RelevanceMatrix& t, std::size_t c_s, double p,
                        SelectionMode mode, int k_fixed = 3);

// Dispatch used by the pipeline and the CLI. An empty history routes cohs,
// dyn_cs and static to the five-sentence window (k = 0) and dyn_hs to the
// full context; the static mode keeps the whole history otherwise.
Selection select_for_turn(const RelevanceMatrix& t, std::size_t c_s,
                          const SelectionParams& params);

}  // namespace cohs

#endif  // COHS_SELECTOR_H_
