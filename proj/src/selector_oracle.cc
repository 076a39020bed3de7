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

// Brute-force selection. Shares no code with selector.cc beyond the public
// types: every candidate block is listed and summed cell by cell.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cohs/errors.h"
#include "cohs/selector.h"

namespace cohs {
namespace {

struct Candidate {
  std::size_t first;
  std::size_t last;  // exclusive
  std::size_t k;
  double sum;
};

double naive_sum(const RelevanceMatrix& t, std::size_t first, std::size_t last,
                 std::size_t k) {
  const std::size_t h = t.cols();
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    for (std::size_t j = h - k; j < h; ++j) s += t.at(i, j);
  }
  return s;
}

bool preferred(const Candidate& a, const Candidate& b) {
  std::size_t size_a = (a.last - a.first) + a.k;
  std::size_t size_b = (b.last - b.first) + b.k;
  if (size_a != size_b) return size_a < size_b;
  if (std::fabs(a.sum - b.sum) > kTieTolerance) return a.sum > b.sum;
  if (a.k != b.k) return a.k < b.k;
  return a.first < b.first;
}

Selection exhaustive(const RelevanceMatrix& t, std::size_t c_s, double p,
                     const std::vector<std::size_t>& suffixes) {
  const std::size_t m = t.rows();
  std::vector<Candidate> all;
  for (std::size_t first = 0; first < m; ++first) {
    for (std::size_t last = first + 1; last <= m; ++last) {
      if (c_s < first || c_s >= last) continue;
      for (std::size_t k : suffixes) {
        all.push_back({first, last, k, naive_sum(t, first, last, k)});
      }
    }
  }

  const Candidate* best = nullptr;
  for (const auto& c : all) {
    if (c.sum < p - kThresholdSlack) continue;
    if (best == nullptr || preferred(c, *best)) best = &c;
  }
  if (best == nullptr) {
    std::size_t k = suffixes.back();
    return Selection{0, m, k, naive_sum(t, 0, m, k), true};
  }
  return Selection{best->first, best->last - best->first, best->k, best->sum,
                   false};
}

}  // namespace

Selection oracle_select(const RelevanceMatrix& t, std::size_t c_s, double p,
                        SelectionMode mode, int k_fixed) {
  if (std::isnan(p) || p < 0.0) {
    throw std::invalid_argument("threshold p must be >= 0");
  }
  const std::size_t m = t.rows();
  const std::size_t h = t.cols();

  if (mode == SelectionMode::kDynHs) {
    if (p == 0.0 || h == 0) return Selection{0, m, 0, 0.0, false};
    for (std::size_t k = 1; k <= h; ++k) {
      double s = naive_sum(t, 0, m, k);
      if (s >= p - kThresholdSlack) return Selection{0, m, k, s, false};
    }
    return Selection{0, m, h, naive_sum(t, 0, m, h), true};
  }
  if (mode == SelectionMode::kStatic) {
    throw std::invalid_argument("oracle covers cohs, dyn_cs and dyn_hs only");
  }

  if (h == 0) throw EmptyHistoryError("selection needs at least one history turn");
  if (c_s >= m) throw IndexError("rationale sentence out of range");

  std::vector<std::size_t> suffixes;
  if (mode == SelectionMode::kCohs) {
    for (std::size_t k = 1; k <= h; ++k) suffixes.push_back(k);
  } else {
    if (k_fixed < 1) throw std::invalid_argument("k_fixed must be >= 1");
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_fixed), h);
    if (p == 0.0) return Selection{c_s, 1, k, naive_sum(t, c_s, c_s + 1, k), false};
    suffixes.push_back(k);
  }
  return exhaustive(t, c_s, p, suffixes);
}

}  // namespace cohs
