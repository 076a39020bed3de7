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

#include "cohs/services.h"

#include <stdexcept>
#include <unordered_map>

#include "cohs/errors.h"
#include "json.hpp"

namespace cohs {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmbedRequest, texts)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmbedResponse, embeddings)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GenerateRequest, prompt)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GenerateResponse, text)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QARequest, question, context)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QAResponse, answer)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExtractRequest, sentence)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExtractResponse, spans)

namespace {

template <typename T>
T decode_as(std::string_view body, const char* what) {
  try {
    return json::parse(body).get<T>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed ") + what + ": " + e.what());
  }
}

class TableEmbedder final : public Embedder {
 public:
  explicit TableEmbedder(std::vector<NamedEmbedding> table) {
    for (auto& e : table) {
      std::vector<double> v(e.embedding.values().begin(), e.embedding.values().end());
      table_.insert_or_assign(std::move(e.id), std::move(v));
    }
  }

 private:
  EmbedResponse do_embed(const EmbedRequest& request) const override {
    EmbedResponse out;
    for (const auto& text : request.texts) {
      auto it = table_.find(text);
      if (it == table_.end()) {
        throw ProtocolError("embedding table has no entry for \"" + text + "\"");
      }
      out.embeddings.push_back(it->second);
    }
    return out;
  }

  std::unordered_map<std::string, std::vector<double>> table_;
};

class ScaledEmbedder final : public Embedder {
 public:
  ScaledEmbedder(std::shared_ptr<const Embedder> inner, double factor)
      : inner_(std::move(inner)), factor_(factor) {}

 private:
  EmbedResponse do_embed(const EmbedRequest& request) const override {
    EmbedResponse out;
    for (const auto& e : inner_->embed_batch(request.texts)) {
      std::vector<double> v(e.values().begin(), e.values().end());
      for (double& x : v) x *= factor_;
      out.embeddings.push_back(std::move(v));
    }
    return out;
  }

  std::shared_ptr<const Embedder> inner_;
  double factor_;
};

}  // namespace

void ServiceEndpoint::validate() const {
  if (base_url.empty()) throw std::invalid_argument("endpoint base_url is empty");
  if (timeout_ms <= 0) throw std::invalid_argument("endpoint timeout_ms must be > 0");
  if (retries < 0) throw std::invalid_argument("endpoint retries must be >= 0");
}

std::string encode(const EmbedRequest& r) { return json(r).dump(); }
std::string encode(const EmbedResponse& r) { return json(r).dump(); }
std::string encode(const GenerateRequest& r) { return json(r).dump(); }
std::string encode(const GenerateResponse& r) { return json(r).dump(); }
std::string encode(const QARequest& r) { return json(r).dump(); }
std::string encode(const QAResponse& r) { return json(r).dump(); }
std::string encode(const ExtractRequest& r) { return json(r).dump(); }
std::string encode(const ExtractResponse& r) { return json(r).dump(); }

EmbedRequest decode_embed_request(std::string_view body) {
  return decode_as<EmbedRequest>(body, "embed request");
}
EmbedResponse decode_embed_response(std::string_view body) {
  return decode_as<EmbedResponse>(body, "embed response");
}
GenerateRequest decode_generate_request(std::string_view body) {
  return decode_as<GenerateRequest>(body, "generate request");
}
GenerateResponse decode_generate_response(std::string_view body) {
  return decode_as<GenerateResponse>(body, "generate response");
}
QARequest decode_qa_request(std::string_view body) {
  return decode_as<QARequest>(body, "qa request");
}
QAResponse decode_qa_response(std::string_view body) {
  return decode_as<QAResponse>(body, "qa response");
}
ExtractRequest decode_extract_request(std::string_view body) {
  return decode_as<ExtractRequest>(body, "extract request");
}
ExtractResponse decode_extract_response(std::string_view body) {
  return decode_as<ExtractResponse>(body, "extract response");
}

std::vector<Embedding> Embedder::embed_batch(const std::vector<std::string>& texts) const {
  if (texts.empty()) return {};
  EmbedResponse response = do_embed(EmbedRequest{texts});
  if (response.embeddings.size() != texts.size()) {
    throw ProtocolError("embedder returned " +
                        std::to_string(response.embeddings.size()) +
                        " embeddings for " + std::to_string(texts.size()) +
                        " texts");
  }
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (auto& v : response.embeddings) {
    if (!out.empty() && v.size() != out.front().dim()) {
      throw ProtocolError("embedder returned mixed dimensions");
    }
    try {
      out.emplace_back(std::move(v));
    } catch (const Error& e) {
      throw ProtocolError(std::string("invalid embedding: ") + e.what());
    }
  }
  return out;
}

std::string QuestionGenerator::generate(const std::string& prompt) const {
  if (prompt.empty()) throw std::invalid_argument("empty prompt");
  GenerateResponse response = do_generate(GenerateRequest{prompt});
  if (response.text.empty()) throw ProtocolError("generator returned empty text");
  return response.text;
}

std::string QuestionAnswerer::answer(const std::string& question,
                                     const std::string& context) const {
  if (question.empty() || context.empty()) {
    throw std::invalid_argument("qa needs a question and a context");
  }
  return do_answer(QARequest{question, context}).answer;
}

std::vector<std::string> SpanExtractor::extract_spans(const std::string& sentence) const {
  if (sentence.empty()) throw std::invalid_argument("empty sentence");
  ExtractResponse response = do_extract(ExtractRequest{sentence});
  for (const auto& span : response.spans) {
    if (span.empty() || sentence.find(span) == std::string::npos) {
      throw ProtocolError("extracted span \"" + span +
                          "\" is not a substring of the sentence");
    }
  }
  return std::move(response.spans);
}

std::shared_ptr<const Embedder> make_table_embedder(std::vector<NamedEmbedding> table) {
  return std::make_shared<TableEmbedder>(std::move(table));
}

std::shared_ptr<const Embedder> make_scaled_embedder(
    std::shared_ptr<const Embedder> inner, double factor) {
  return std::make_shared<ScaledEmbedder>(std::move(inner), factor);
}

}  // namespace cohs
