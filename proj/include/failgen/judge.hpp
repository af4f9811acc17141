// SPDX-License-Identifier: Apache-2.0
//
// External judge for fuzzy matching, and an HTTP embedding client.
#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/metrics.hpp"

namespace failgen {

// Sends one prompt and returns the raw reply text. Any exception is treated
// as a transient failure and retried by JudgeClient.
class JudgeTransport {
 public:
  virtual ~JudgeTransport() = default;
  virtual std::string send(const std::string& prompt) = 0;
};

class CallbackTransport final : public JudgeTransport {
 public:
  explicit CallbackTransport(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::string send(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

struct HttpEndpoint {
  std::string url;  // scheme://host[:port]/path
  std::string api_key;
  std::string model;
  std::chrono::milliseconds timeout{30000};
};

// Chat-completion style POST: {"model", "messages":[{"role":"user",...}]};
// the reply is choices[0].message.content.
class HttpJudgeTransport final : public JudgeTransport {
 public:
  explicit HttpJudgeTransport(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string send(const std::string& prompt) override;

 private:
  HttpEndpoint endpoint_;
};

// FAILGEN_JUDGE_ENDPOINT, FAILGEN_JUDGE_API_KEY, FAILGEN_JUDGE_MODEL.
std::optional<HttpEndpoint> judge_endpoint_from_env();
// FAILGEN_EMBED_ENDPOINT, FAILGEN_EMBED_API_KEY, FAILGEN_EMBED_MODEL.
std::optional<HttpEndpoint> embed_endpoint_from_env();

struct JudgeOptions {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  double backoff_factor = 2.0;
  unsigned concurrency = 4;
};

std::string judge_prompt(std::string_view candidate, std::string_view reference);
// Integer 0..10, surrounding whitespace allowed. Throws Error(MalformedJudgeReply).
int parse_judge_reply(std::string_view reply);

class JudgeClient {
 public:
  JudgeClient(std::shared_ptr<JudgeTransport> transport, JudgeOptions options = {});

  // Score in [0, 1]. Throws Error(JudgeUnavailable) once retries are
  // exhausted, Error(MalformedJudgeReply) for an unparseable reply.
  double score(std::string_view candidate, std::string_view reference) const;

  const JudgeOptions& options() const { return options_; }
  std::size_t attempts() const { return attempts_.load(); }

 private:
  std::shared_ptr<JudgeTransport> transport_;
  JudgeOptions options_;
  mutable std::atomic<std::size_t> attempts_{0};
};

// POST {"model", "input": [text]}; reads data[0].embedding.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<double> embed(const std::string& text) override;

 private:
  HttpEndpoint endpoint_;
};

// Shared POST helper; throws Error(JudgeUnavailable) on transport or HTTP
// status errors.
std::string http_post_json(const HttpEndpoint& endpoint, const std::string& body);

}  // namespace failgen
