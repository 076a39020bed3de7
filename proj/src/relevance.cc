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

#include "cohs/relevance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cohs/errors.h"
#include "json.hpp"

namespace cohs {

using nlohmann::json;

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimError("embedding has dimension 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw FormatError("embedding has a non-finite entry");
  }
}

RelevanceMatrix::RelevanceMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw FormatError("matrix data has " + std::to_string(data_.size()) +
                      " values, expected " + std::to_string(rows_ * cols_));
  }
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw DimError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                   std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVectorError("all-zero embedding");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::string turn_text(std::string_view question, std::string_view answer) {
  std::string out(question);
  if (!answer.empty()) {
    out += ' ';
    out += answer;
  }
  return out;
}

RelevanceMatrix build_relevance_matrix(std::span<const Embedding> sentence_embs,
                                       std::span<const Embedding> turn_embs) {
  if (sentence_embs.empty()) throw DimError("no sentence embeddings");
  const std::size_t m = sentence_embs.size();
  const std::size_t h = turn_embs.size();
  std::vector<double> data(m * h);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < h; ++j) {
      const std::string at =
          " at (" + std::to_string(i) + ", " + std::to_string(j) + ")";
      try {
        data[i * h + j] = cosine(sentence_embs[i], turn_embs[j]);
      } catch (const DimError& e) {
        throw DimError(e.what() + at);
      } catch (const ZeroVectorError& e) {
        throw ZeroVectorError(e.what() + at);
      }
    }
  }
  return RelevanceMatrix(m, h, std::move(data));
}

std::string matrix_to_json(const RelevanceMatrix& matrix) {
  json doc = {{"rows", matrix.rows()},
              {"cols", matrix.cols()},
              {"data", std::vector<double>(matrix.data().begin(),
                                           matrix.data().end())}};
  return doc.dump();
}

RelevanceMatrix matrix_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    auto rows = doc.at("rows").get<std::size_t>();
    auto cols = doc.at("cols").get<std::size_t>();
    auto data = doc.at("data").get<std::vector<double>>();
    return RelevanceMatrix(rows, cols, std::move(data));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed matrix file: ") + e.what());
  }
}

void store_matrix(const RelevanceMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << matrix_to_json(matrix) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

RelevanceMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return matrix_from_json(buffer.str());
}

void store_embeddings(std::span<const NamedEmbedding> embeddings,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& e : embeddings) {
    json line = {{"id", e.id},
                 {"vector", std::vector<double>(e.embedding.values().begin(),
                                                e.embedding.values().end())}};
    out << line.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<NamedEmbedding> load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<NamedEmbedding> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json doc = json::parse(line);
      out.push_back(NamedEmbedding{doc.at("id").get<std::string>(),
                                   Embedding(doc.at("vector").get<std::vector<double>>())});
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cohs
