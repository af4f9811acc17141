// SPDX-License-Identifier: Apache-2.0
#include "failgen/judge.hpp"

#include <httplib.h>

#include <cctype>
#include <cstdlib>
#include <thread>

#include "failgen/error.hpp"
#include "failgen/json.hpp"

namespace failgen {

namespace {

std::optional<HttpEndpoint> endpoint_from_env(const char* url_var, const char* key_var, const char* model_var) {
  const char* url = std::getenv(url_var);
  if (url == nullptr || *url == '\0') return std::nullopt;
  HttpEndpoint e;
  e.url = url;
  if (const char* key = std::getenv(key_var)) e.api_key = key;
  if (const char* model = std::getenv(model_var)) e.model = model;
  return e;
}

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::InvalidArgument, "endpoint '" + url + "' lacks a scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string http_post_json(const HttpEndpoint& endpoint, const std::string& body) {
  const SplitUrl u = split_url(endpoint.url);
  httplib::Client client(u.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  auto res = client.Post(u.path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::JudgeUnavailable, "request to " + endpoint.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::JudgeUnavailable, "request to " + endpoint.url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string HttpJudgeTransport::send(const std::string& prompt) {
  Json req = Json::object();
  if (!endpoint_.model.empty()) req["model"] = endpoint_.model;
  req["temperature"] = 0;
  req["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt}}});
  const std::string body = http_post_json(endpoint_, req.dump());
  try {
    const Json reply = Json::parse(body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedJudgeReply, std::string("judge response is not a chat completion: ") + e.what());
  }
}

std::optional<HttpEndpoint> judge_endpoint_from_env() {
  return endpoint_from_env("FAILGEN_JUDGE_ENDPOINT", "FAILGEN_JUDGE_API_KEY", "FAILGEN_JUDGE_MODEL");
}

std::optional<HttpEndpoint> embed_endpoint_from_env() {
  return endpoint_from_env("FAILGEN_EMBED_ENDPOINT", "FAILGEN_EMBED_API_KEY", "FAILGEN_EMBED_MODEL");
}

std::string judge_prompt(std::string_view candidate, std::string_view reference) {
  std::string p =
      "You are grading a student's explanation of a robot manipulation failure against the teacher's reference "
      "explanation. Rate how closely the student's explanation matches the teacher's in meaning on a scale from 0 "
      "(unrelated or contradictory) to 10 (equivalent). Reply with only an integer.\n";
  p += "Teacher: ";
  p += reference;
  p += "\nStudent: ";
  p += candidate;
  p += "\n";
  return p;
}

int parse_judge_reply(std::string_view reply) {
  std::size_t b = 0;
  std::size_t e = reply.size();
  while (b < e && std::isspace(static_cast<unsigned char>(reply[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(reply[e - 1]))) --e;
  const std::string_view core = reply.substr(b, e - b);
  if (core.empty() || core.size() > 2) {
    throw Error(ErrorCode::MalformedJudgeReply, "judge reply '" + std::string(reply) + "' is not an integer 0-10");
  }
  int v = 0;
  for (char c : core) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::MalformedJudgeReply, "judge reply '" + std::string(reply) + "' is not an integer 0-10");
    }
    v = v * 10 + (c - '0');
  }
  if (v > 10) throw Error(ErrorCode::MalformedJudgeReply, "judge score " + std::to_string(v) + " exceeds 10");
  return v;
}

JudgeClient::JudgeClient(std::shared_ptr<JudgeTransport> transport, JudgeOptions options)
    : transport_(std::move(transport)), options_(options) {
  if (!transport_) throw Error(ErrorCode::JudgeUnavailable, "no judge transport configured");
  if (options_.max_retries < 0 || options_.concurrency == 0) {
    throw Error(ErrorCode::InvalidArgument, "judge retries must be >= 0 and concurrency >= 1");
  }
}

double JudgeClient::score(std::string_view candidate, std::string_view reference) const {
  const std::string prompt = judge_prompt(candidate, reference);
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(backoff.count() * options_.backoff_factor));
    }
    ++attempts_;
    std::string reply;
    try {
      reply = transport_->send(prompt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedJudgeReply) throw;
      last_error = e.what();
      continue;
    } catch (const std::exception& e) {
      last_error = e.what();
      continue;
    }
    return parse_judge_reply(reply) / 10.0;
  }
  throw Error(ErrorCode::JudgeUnavailable, "judge unavailable after " + std::to_string(options_.max_retries + 1) +
                                               " attempts: " + last_error);
}

std::vector<double> HttpEmbedder::embed(const std::string& text) {
  Json req = Json::object();
  if (!endpoint_.model.empty()) req["model"] = endpoint_.model;
  req["input"] = Json::array({text});
  const std::string body = http_post_json(endpoint_, req.dump());
  try {
    return Json::parse(body).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::JudgeUnavailable, std::string("malformed embedding response: ") + e.what());
  }
}

}  // namespace failgen
