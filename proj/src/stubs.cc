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

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cohs/services.h"
#include "cohs/text.h"

namespace cohs {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void add_hashed_vector(std::vector<double>& acc, std::string_view key,
                       std::uint64_t seed) {
  std::uint64_t state = fnv1a(key) ^ (seed * 0xd1342543de82ef95ULL);
  for (double& x : acc) {
    double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x += 2.0 * unit - 1.0;
  }
}

class StubEmbedder final : public Embedder {
 public:
  explicit StubEmbedder(std::uint64_t seed) : seed_(seed) {}

 private:
  EmbedResponse do_embed(const EmbedRequest& request) const override {
    EmbedResponse out;
    for (const auto& text : request.texts) out.embeddings.push_back(embed_one(text));
    return out;
  }

  std::vector<double> embed_one(const std::string& text) const {
    std::vector<double> v(kStubEmbeddingDim, 0.0);
    const std::string lowered = to_lower(text);
    bool any = false;
    for (std::string_view tok : split_whitespace(lowered)) {
      tok = strip_punctuation(tok);
      if (tok.empty()) continue;
      add_hashed_vector(v, tok, seed_);
      any = true;
    }
    if (!any) add_hashed_vector(v, text, seed_);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[0] = 1.0;
      return v;
    }
    for (double& x : v) x /= norm;
    return v;
  }

  std::uint64_t seed_;
};

class StubGenerator final : public QuestionGenerator {
 private:
  GenerateResponse do_generate(const GenerateRequest& request) const override {
    auto words = split_whitespace(request.prompt);
    std::string text = "Q:";
    for (std::size_t i = 0; i < words.size() && i < 8; ++i) {
      text += ' ';
      text += words[i];
    }
    return {text + "?"};
  }
};

class StubQA final : public QuestionAnswerer {
 private:
  QAResponse do_answer(const QARequest& request) const override {
    std::string_view target;
    auto q_words = split_whitespace(request.question);
    for (auto it = q_words.rbegin(); it != q_words.rend() && target.empty(); ++it) {
      target = strip_punctuation(*it);
    }
    const std::string wanted = to_lower(target);
    std::string_view first;
    for (std::string_view w : split_whitespace(request.context)) {
      w = strip_punctuation(w);
      if (w.empty()) continue;
      if (first.empty()) first = w;
      if (!wanted.empty() && to_lower(w) == wanted) return {std::string(w)};
    }
    return {std::string(first)};
  }
};

bool is_stopword(std::string_view lowered) {
  static const std::vector<std::string_view> kStop = {
      "the",  "and",  "but",  "for",  "with", "from", "was",  "were", "are",
      "been", "his",  "her",  "its",  "their", "them", "him", "she",  "they",
      "that", "this", "there", "then", "than", "very", "not",  "had",  "has",
      "have", "did",  "does", "said", "into", "onto", "over", "out",  "all"};
  return std::find(kStop.begin(), kStop.end(), lowered) != kStop.end();
}

bool is_alpha_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
}

class StubExtractor final : public SpanExtractor {
 private:
  ExtractResponse do_extract(const ExtractRequest& request) const override {
    std::vector<std::string_view> tokens;
    for (std::string_view w : split_whitespace(request.sentence)) {
      w = strip_punctuation(w);
      if (!w.empty()) tokens.push_back(w);
    }
    ExtractResponse out;
    auto add = [&](std::string_view w) {
      std::string s(w);
      if (std::find(out.spans.begin(), out.spans.end(), s) == out.spans.end()) {
        out.spans.push_back(std::move(s));
      }
    };
    for (std::string_view w : tokens) {
      if (std::isupper(static_cast<unsigned char>(w.front()))) add(w);
    }
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
      if (is_alpha_word(*it) && it->size() >= 3 && !is_stopword(to_lower(*it))) {
        add(*it);
        break;
      }
    }
    return out;
  }
};

}  // namespace

ServiceClients make_stub_suite(std::uint64_t seed) {
  return ServiceClients{std::make_shared<StubEmbedder>(seed),
                        std::make_shared<StubGenerator>(),
                        std::make_shared<StubQA>(), std::make_shared<StubExtractor>()};
}

}  // namespace cohs
