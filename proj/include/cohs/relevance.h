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

#ifndef COHS_RELEVANCE_H_
#define COHS_RELEVANCE_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cohs {

// A finite, non-empty embedding vector.
class Embedding {
 public:
  // Throws DimError when empty and FormatError on non-finite entries.
  explicit Embedding(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

// Row-major m x h matrix; rows are context sentences, columns history turns.
class RelevanceMatrix {
 public:
  RelevanceMatrix() = default;
  // Throws FormatError when data.size() != rows * cols.
  RelevanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const RelevanceMatrix&, const RelevanceMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Cosine similarity clamped to [-1, 1]. Throws DimError / ZeroVectorError.
double cosine(const Embedding& a, const Embedding& b);

// Text embedded for one history turn: question and answer joined by a space.
std::string turn_text(std::string_view question, std::string_view answer);

// T[i][j] = cosine(sentence_embs[i], turn_embs[j]). An empty turn list gives
// an m x 0 matrix. Errors carry the failing (i, j).
RelevanceMatrix build_relevance_matrix(std::span<const Embedding> sentence_embs,
                                       std::span<const Embedding> turn_embs);

// {"rows": m, "cols": h, "data": [...]} with round-trip double precision.
void store_matrix(const RelevanceMatrix& matrix, const std::string& path);
RelevanceMatrix load_matrix(const std::string& path);
std::string matrix_to_json(const RelevanceMatrix& matrix);
RelevanceMatrix matrix_from_json(std::string_view text);

struct NamedEmbedding {
  std::string id;
  Embedding embedding;
};

// JSON-lines, one {"id": ..., "vector": [...]} object per line.
void store_embeddings(std::span<const NamedEmbedding> embeddings,
                      const std::string& path);
std::vector<NamedEmbedding> load_embeddings(const std::string& path);

}  // namespace cohs

#endif  // COHS_RELEVANCE_H_
