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

#include "cohs/selector.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cohs/errors.h"

namespace cohs {
namespace {

// Row-major cell-by-cell sum; used for the reported achieved_sum so that
// every path reports the same bits for the same block.
double block_sum(const RelevanceMatrix& t, IndexRange rows, IndexRange cols) {
  double s = 0.0;
  for (std::size_t i = rows.begin; i < rows.end; ++i) {
    for (std::size_t j = cols.begin; j < cols.end; ++j) s += t.at(i, j);
  }
  return s;
}

bool reaches(double sum, double p) { return sum >= p - kThresholdSlack; }

// True when candidate a beats b: smaller u + k, then larger sum, then
// smaller k, then smaller window_start.
bool better(const Selection& a, const Selection& b) {
  if (a.u + a.k != b.u + b.k) return a.u + a.k < b.u + b.k;
  if (std::abs(a.achieved_sum - b.achieved_sum) > kTieTolerance) {
    return a.achieved_sum > b.achieved_sum;
  }
  if (a.k != b.k) return a.k < b.k;
  return a.window_start < b.window_start;
}

void check_inputs(const RelevanceMatrix& t, std::size_t c_s) {
  if (t.cols() == 0) {
    throw EmptyHistoryError("selection needs at least one history turn");
  }
  if (c_s >= t.rows()) {
    throw IndexError("rationale sentence " + std::to_string(c_s) +
                     " out of range for " + std::to_string(t.rows()) +
                     " sentences");
  }
}

void check_threshold(double p) {
  if (std::isnan(p) || p < 0.0) {
    throw std::invalid_argument("threshold p must be >= 0");
  }
}

// Best window containing c_s over a fixed set of suffix lengths.
Selection search(const RelevanceMatrix& t, std::size_t c_s, double p,
                 std::size_t k_min, std::size_t k_max) {
  const std::size_t m = t.rows();
  const std::size_t h = t.cols();
  const PrefixSumTable table(t);

  std::optional<Selection> best;
  for (std::size_t first = 0; first <= c_s; ++first) {
    for (std::size_t last = c_s + 1; last <= m; ++last) {
      for (std::size_t k = k_min; k <= k_max; ++k) {
        double s = table.window_sum({first, last}, {h - k, h});
        if (!reaches(s, p)) continue;
        Selection cand{first, last - first, k, s, false};
        if (!best || better(cand, *best)) best = cand;
      }
    }
  }
  if (!best) {
    return Selection{0, m, k_max, block_sum(t, {0, m}, {h - k_max, h}), true};
  }
  best->achieved_sum = block_sum(t, {best->window_start, best->window_end()},
                                 {h - best->k, h});
  return *best;
}

}  // namespace

std::string_view to_string(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kCohs: return "cohs";
    case SelectionMode::kDynCs: return "dyn_cs";
    case SelectionMode::kDynHs: return "dyn_hs";
    case SelectionMode::kStatic: return "static";
  }
  return "unknown";
}

SelectionMode parse_selection_mode(std::string_view name) {
  if (name == "cohs") return SelectionMode::kCohs;
  if (name == "dyn_cs") return SelectionMode::kDynCs;
  if (name == "dyn_hs") return SelectionMode::kDynHs;
  if (name == "static") return SelectionMode::kStatic;
  throw std::invalid_argument("unknown selection mode: " + std::string(name));
}

void SelectionParams::validate() const {
  check_threshold(p);
  if (k_fixed < 1) throw std::invalid_argument("k_fixed must be >= 1");
}

std::string describe(const Selection& s) {
  std::ostringstream os;
  os << "window [" << s.window_start << ", " << s.window_end() << ") u=" << s.u
     << " k=" << s.k << " sum=" << s.achieved_sum
     << (s.fallback ? " (fallback)" : "");
  return os.str();
}

PrefixSumTable::PrefixSumTable(const RelevanceMatrix& t)
    : rows_(t.rows()), cols_(t.cols()), table_((rows_ + 1) * (cols_ + 1), 0.0) {
  const std::size_t stride = cols_ + 1;
  for (std::size_t i = 1; i <= rows_; ++i) {
    for (std::size_t j = 1; j <= cols_; ++j) {
      table_[i * stride + j] = t.at(i - 1, j - 1) + table_[(i - 1) * stride + j] +
                               table_[i * stride + j - 1] -
                               table_[(i - 1) * stride + j - 1];
    }
  }
}

double PrefixSumTable::window_sum(IndexRange rows, IndexRange cols) const {
  if (rows.begin > rows.end || rows.end > rows_ || cols.begin > cols.end ||
      cols.end > cols_) {
    throw IndexError("window out of range");
  }
  return at(rows.end, cols.end) - at(rows.begin, cols.end) -
         at(rows.end, cols.begin) + at(rows.begin, cols.begin);
}

Selection cohs_select(const RelevanceMatrix& t, std::size_t c_s, double p) {
  check_threshold(p);
  check_inputs(t, c_s);
  return search(t, c_s, p, 1, t.cols());
}

Selection dyn_cs_select(const RelevanceMatrix& t, std::size_t c_s, double p,
                        int k_fixed) {
  check_threshold(p);
  check_inputs(t, c_s);
  if (k_fixed < 1) throw std::invalid_argument("k_fixed must be >= 1");
  const std::size_t h = t.cols();
  const std::size_t k = std::min(static_cast<std::size_t>(k_fixed), h);
  if (p == 0.0) {
    return Selection{c_s, 1, k, block_sum(t, {c_s, c_s + 1}, {h - k, h}), false};
  }
  return search(t, c_s, p, k, k);
}

Selection dyn_hs_select(const RelevanceMatrix& t, double p) {
  check_threshold(p);
  const std::size_t m = t.rows();
  const std::size_t h = t.cols();
  if (p == 0.0 || h == 0) return Selection{0, m, 0, 0.0, false};

  const PrefixSumTable table(t);
  for (std::size_t k = 1; k <= h; ++k) {
    if (reaches(table.window_sum({0, m}, {h - k, h}), p)) {
      return Selection{0, m, k, block_sum(t, {0, m}, {h - k, h}), false};
    }
  }
  return Selection{0, m, h, block_sum(t, {0, m}, {0, h}), true};
}

IndexRange static_five_window(std::size_t m, std::size_t s) {
  if (s < 1 || s > m) {
    throw IndexError("rationale sentence " + std::to_string(s) +
                     " out of range 1.." + std::to_string(m));
  }
  if (m <= 5) return {0, m};
  std::size_t first;  // 1-based
  if (s >= 3 && s + 2 <= m) {
    first = s - 2;
  } else if (s <= 2) {
    first = 1;
  } else {
    first = m - 4;
  }
  return {first - 1, first + 4};
}

Selection select_for_turn(const RelevanceMatrix& t, std::size_t c_s,
                          const SelectionParams& params) {
  params.validate();
  const std::size_t m = t.rows();
  const std::size_t h = t.cols();
  if (c_s >= m) {
    throw IndexError("rationale sentence " + std::to_string(c_s) +
                     " out of range");
  }

  if (h == 0) {
    if (params.mode == SelectionMode::kDynHs) return dyn_hs_select(t, params.p);
    IndexRange w = static_five_window(m, c_s + 1);
    return Selection{w.begin, w.end - w.begin, 0, 0.0, false};
  }
  switch (params.mode) {
    case SelectionMode::kCohs:
      return cohs_select(t, c_s, params.p);
    case SelectionMode::kDynCs:
      return dyn_cs_select(t, c_s, params.p, params.k_fixed);
    case SelectionMode::kDynHs:
      return dyn_hs_select(t, params.p);
    case SelectionMode::kStatic: {
      IndexRange w = static_five_window(m, c_s + 1);
      return Selection{w.begin, w.end - w.begin, h, block_sum(t, w, {0, h}),
                       false};
    }
  }
  throw std::invalid_argument("unknown selection mode");
}

}  // namespace cohs
