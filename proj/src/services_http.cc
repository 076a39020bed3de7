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

#include <chrono>
#include <stdexcept>
#include <thread>

#include "cohs/errors.h"
#include "cohs/services.h"
#include "httplib.h"

namespace cohs {
namespace {

constexpr int kBackoffBaseMs = 50;

// Posts JSON to one route. A fresh connection per call keeps the client
// free of shared mutable state.
class JsonPoster {
 public:
  explicit JsonPoster(ServiceEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    endpoint_.validate();
    const std::string& url = endpoint_.base_url;
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
      throw std::invalid_argument("only http:// endpoints are supported: " + url);
    }
    std::size_t path_at = url.find('/', scheme.size());
    if (path_at == std::string::npos) {
      host_ = url;
    } else {
      host_ = url.substr(0, path_at);
      prefix_ = url.substr(path_at);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  std::string post(const std::string& route, const std::string& body) const {
    const std::string path = prefix_ + route;
    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(kBackoffBaseMs << (attempt - 1)));
      }
      httplib::Client client(host_);
      const auto timeout = std::chrono::milliseconds(endpoint_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);

      auto result = client.Post(path, body, "application/json");
      if (!result) {
        last_error = httplib::to_string(result.error());
        continue;
      }
      if (result->status >= 500) {
        last_error = "HTTP " + std::to_string(result->status);
        continue;
      }
      if (result->status != 200) {
        throw ProtocolError(host_ + path + " answered HTTP " +
                            std::to_string(result->status));
      }
      return result->body;
    }
    const int attempts = endpoint_.retries + 1;
    throw ServiceUnavailable(host_ + path + " unavailable after " +
                             std::to_string(attempts) +
                             (attempts == 1 ? " attempt: " : " attempts: ") + last_error);
  }

 private:
  ServiceEndpoint endpoint_;
  std::string host_;
  std::string prefix_;
};

class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(ServiceEndpoint e) : poster_(std::move(e)) {}

 private:
  EmbedResponse do_embed(const EmbedRequest& request) const override {
    return decode_embed_response(poster_.post("/embed", encode(request)));
  }
  JsonPoster poster_;
};

class HttpGenerator final : public QuestionGenerator {
 public:
  explicit HttpGenerator(ServiceEndpoint e) : poster_(std::move(e)) {}

 private:
  GenerateResponse do_generate(const GenerateRequest& request) const override {
    return decode_generate_response(poster_.post("/generate", encode(request)));
  }
  JsonPoster poster_;
};

class HttpQA final : public QuestionAnswerer {
 public:
  explicit HttpQA(ServiceEndpoint e) : poster_(std::move(e)) {}

 private:
  QAResponse do_answer(const QARequest& request) const override {
    return decode_qa_response(poster_.post("/qa", encode(request)));
  }
  JsonPoster poster_;
};

class HttpExtractor final : public SpanExtractor {
 public:
  explicit HttpExtractor(ServiceEndpoint e) : poster_(std::move(e)) {}

 private:
  ExtractResponse do_extract(const ExtractRequest& request) const override {
    return decode_extract_response(poster_.post("/extract", encode(request)));
  }
  JsonPoster poster_;
};

}  // namespace

std::shared_ptr<const Embedder> make_http_embedder(ServiceEndpoint endpoint) {
  return std::make_shared<HttpEmbedder>(std::move(endpoint));
}
std::shared_ptr<const QuestionGenerator> make_http_generator(ServiceEndpoint endpoint) {
  return std::make_shared<HttpGenerator>(std::move(endpoint));
}
std::shared_ptr<const QuestionAnswerer> make_http_qa(ServiceEndpoint endpoint) {
  return std::make_shared<HttpQA>(std::move(endpoint));
}
std::shared_ptr<const SpanExtractor> make_http_extractor(ServiceEndpoint endpoint) {
  return std::make_shared<HttpExtractor>(std::move(endpoint));
}

}  // namespace cohs
