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

// Clients for the four external models.
//
// Wire protocol: JSON over HTTP POST.
//
//   POST /embed     {"texts": [str]}                  -> {"embeddings": [[num]]}
//   POST /generate  {"prompt": str}                   -> {"text": str}
//   POST /qa        {"question": str, "context": str} -> {"answer": str}
//   POST /extract   {"sentence": str}                 -> {"spans": [str]}
//
// Every client validates responses before returning them, whether it talks
// HTTP or runs in process, and throws ProtocolError on a violation.

#ifndef COHS_SERVICES_H_
#define COHS_SERVICES_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cohs/relevance.h"

namespace cohs {

struct ServiceEndpoint {
  std::string base_url;  // e.g. http://127.0.0.1:8000 or http://host/prefix
  int timeout_ms = 30000;
  int retries = 2;

  // Throws std::invalid_argument.
  void validate() const;
};

struct EmbedRequest {
  std::vector<std::string> texts;
  friend bool operator==(const EmbedRequest&, const EmbedRequest&) = default;
};
struct EmbedResponse {
  std::vector<std::vector<double>> embeddings;
  friend bool operator==(const EmbedResponse&, const EmbedResponse&) = default;
};
struct GenerateRequest {
  std::string prompt;
  friend bool operator==(const GenerateRequest&, const GenerateRequest&) = default;
};
struct GenerateResponse {
  std::string text;
  friend bool operator==(const GenerateResponse&, const GenerateResponse&) = default;
};
struct QARequest {
  std::string question;
  std::string context;
  friend bool operator==(const QARequest&, const QARequest&) = default;
};
struct QAResponse {
  std::string answer;
  friend bool operator==(const QAResponse&, const QAResponse&) = default;
};
struct ExtractRequest {
  std::string sentence;
  friend bool operator==(const ExtractRequest&, const ExtractRequest&) = default;
};
struct ExtractResponse {
  std::vector<std::string> spans;
  friend bool operator==(const ExtractResponse&, const ExtractResponse&) = default;
};

// Wire encoding. decode_* throw ProtocolError on malformed or incomplete
// bodies.
std::string encode(const EmbedRequest& r);
std::string encode(const EmbedResponse& r);
std::string encode(const GenerateRequest& r);
std::string encode(const GenerateResponse& r);
std::string encode(const QARequest& r);
std::string encode(const QAResponse& r);
std::string encode(const ExtractRequest& r);
std::string encode(const ExtractResponse& r);

EmbedRequest decode_embed_request(std::string_view body);
EmbedResponse decode_embed_response(std::string_view body);
GenerateRequest decode_generate_request(std::string_view body);
GenerateResponse decode_generate_response(std::string_view body);
QARequest decode_qa_request(std::string_view body);
QAResponse decode_qa_response(std::string_view body);
ExtractRequest decode_extract_request(std::string_view body);
ExtractResponse decode_extract_response(std::string_view body);

// Sentence embedder. One embedding per text, all of one dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;

 private:
  virtual EmbedResponse do_embed(const EmbedRequest& request) const = 0;
};

// Question generator. Non-empty text.
class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  std::string generate(const std::string& prompt) const;

 private:
  virtual GenerateResponse do_generate(const GenerateRequest& request) const = 0;
};

// Extractive QA model used by question filtering.
class QuestionAnswerer {
 public:
  virtual ~QuestionAnswerer() = default;
  std::string answer(const std::string& question, const std::string& context) const;

 private:
  virtual QAResponse do_answer(const QARequest& request) const = 0;
};

// Answer-span extractor. Every span is a substring of the sentence.
class SpanExtractor {
 public:
  virtual ~SpanExtractor() = default;
  std::vector<std::string> extract_spans(const std::string& sentence) const;

 private:
  virtual ExtractResponse do_extract(const ExtractRequest& request) const = 0;
};

struct ServiceClients {
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const QuestionGenerator> generator;
  std::shared_ptr<const QuestionAnswerer> qa;
  std::shared_ptr<const SpanExtractor> extractor;
};

// HTTP clients. Transport failures and 5xx replies are retried up to
// endpoint.retries times with exponential backoff, then ServiceUnavailable.
std::shared_ptr<const Embedder> make_http_embedder(ServiceEndpoint endpoint);
std::shared_ptr<const QuestionGenerator> make_http_generator(ServiceEndpoint endpoint);
std::shared_ptr<const QuestionAnswerer> make_http_qa(ServiceEndpoint endpoint);
std::shared_ptr<const SpanExtractor> make_http_extractor(ServiceEndpoint endpoint);

// Embeddings looked up by exact text from a JSON-lines embedding file whose
// ids are the embedded texts.
std::shared_ptr<const Embedder> make_table_embedder(std::vector<NamedEmbedding> table);

// Deterministic in-process models:
//   embedder   sum of per-token seeded pseudo-random vectors, unit norm, dim 16
//   generator  "Q: <first 8 words of the prompt>?"
//   qa         the context word matching the question's last word, else the
//              first word of the context
//   extractor  capitalized tokens then the final noun-like token, deduplicated
inline constexpr std::size_t kStubEmbeddingDim = 16;
ServiceClients make_stub_suite(std::uint64_t seed);

// Multiplies every vector of `inner` by `factor`.
std::shared_ptr<const Embedder> make_scaled_embedder(
    std::shared_ptr<const Embedder> inner, double factor);

}  // namespace cohs

#endif  // COHS_SERVICES_H_
