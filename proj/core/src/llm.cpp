#include "qppkit/llm.hpp"

#include <cmath>
#include <thread>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qppkit/errors.hpp"

namespace qppkit {
namespace {

// Retry classification; both unwind as JudgeError at the API boundary.
struct AuthError : JudgeError {
  using JudgeError::JudgeError;
};
struct TransientError : JudgeError {
  using JudgeError::JudgeError;
};

struct SplitUrl {
  std::string base; // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url must start with http:// or https://: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::chrono::milliseconds backoff_delay(const LlmEndpoint& ep, int attempt) {
  double ms = static_cast<double>(ep.backoff_base.count()) *
              std::pow(ep.backoff_factor, attempt - 1);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

} // namespace

ApiStyle api_style_from(const std::string& name) {
  if (name == "completions") return ApiStyle::completions;
  if (name == "chat") return ApiStyle::chat;
  throw ConfigError("unknown api style: " + name + " (expected completions or chat)");
}

void LlmEndpoint::validate() const {
  if (url.empty()) throw ConfigError("endpoint url is required");
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0) {
    throw ConfigError("endpoint url must start with http:// or https://: " + url);
  }
  if (model.empty()) throw ConfigError("endpoint model is required");
  if (temperature < 0.0 || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and non-negative");
  }
  if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be at least 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (backoff_factor < 1.0) throw ConfigError("backoff_factor must be at least 1");
  if (backoff_base.count() < 0) throw ConfigError("backoff_base must be non-negative");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

LlmClient::LlmClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  endpoint_.validate();
  split_url(endpoint_.url);
}

std::string LlmClient::complete_once(const std::string& prompt) const {
  auto [base, path] = split_url(endpoint_.url);

  // One client per call keeps this safe to use from several judge workers.
  httplib::Client http(base);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
  if (secs.count() < 1) secs = std::chrono::seconds(1);
  http.set_connection_timeout(secs.count(), 0);
  http.set_read_timeout(secs.count(), 0);
  http.set_write_timeout(secs.count(), 0);

  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }

  nlohmann::json body;
  body["model"] = endpoint_.model;
  if (endpoint_.style == ApiStyle::chat) {
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "user"}, {"content", prompt}},
    });
  } else {
    body["prompt"] = prompt;
  }
  body["temperature"] = endpoint_.temperature;
  body["max_tokens"] = endpoint_.max_new_tokens;

  auto res = http.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransientError("request to " + endpoint_.url +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("authentication rejected by " + endpoint_.url + " (HTTP " +
                    std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw TransientError("HTTP " + std::to_string(res->status) + " from " + endpoint_.url);
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransientError("malformed response from " + endpoint_.url + ": " + e.what());
  }

  const auto choices = reply.find("choices");
  if (choices == reply.end() || !choices->is_array() || choices->empty()) {
    throw TransientError("response from " + endpoint_.url + " has no choices");
  }
  const auto& first = (*choices)[0];
  std::string text;
  if (endpoint_.style == ApiStyle::chat) {
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      throw TransientError("chat response from " + endpoint_.url + " has no message content");
    }
    text = first["message"]["content"].get<std::string>();
  } else {
    if (!first.contains("text") || !first["text"].is_string()) {
      throw TransientError("completion response from " + endpoint_.url + " has no text");
    }
    text = first["text"].get<std::string>();
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw TransientError("empty completion from " + endpoint_.url);
  }
  return text;
}

LlmJudge::LlmJudge(LlmEndpoint endpoint) : client_(std::move(endpoint)) {}

std::string LlmJudge::source() const { return "llm:" + client_.endpoint().model; }

JudgmentRecord LlmJudge::judge(const JudgeRequest& request) {
  if (request.query == nullptr || request.document == nullptr) {
    throw JudgeError("llm judge needs query and passage text");
  }
  const std::string prompt = build_relevance_prompt(*request.query, *request.document);
  const auto& ep = client_.endpoint();

  for (int attempt = 1;; ++attempt) {
    std::string text;
    bool have_text = false;
    try {
      text = client_.complete_once(prompt);
      have_text = true;
    } catch (const AuthError&) {
      throw;
    } catch (const JudgeError&) {
      if (attempt >= ep.max_attempts) throw;
    }
    if (have_text) {
      try {
        int label = parse_relevance_output(text);
        JudgmentRecord rec{request.query_id, request.doc_id, label, source()};
        rec.raw_output = text;
        return rec;
      } catch (const JudgeError&) {
        if (attempt >= ep.max_attempts) {
          JudgmentRecord rec{request.query_id, request.doc_id, 0, source()};
          rec.raw_output = text;
          rec.fallback = true;
          return rec;
        }
      }
    }
    std::this_thread::sleep_for(backoff_delay(ep, attempt));
  }
}

DirectScore qpp_llm_direct(const LlmClient& client, const std::string& query,
                           const std::vector<std::string>& passages,
                           const std::vector<Demonstration>& demonstrations) {
  const std::string prompt = build_qpp_score_prompt(query, passages, demonstrations);
  const auto& ep = client.endpoint();

  for (int attempt = 1;; ++attempt) {
    try {
      std::string text = client.complete_once(prompt);
      ParsedScore parsed = parse_score_output(text);
      return DirectScore{parsed.value, parsed.clamped};
    } catch (const AuthError&) {
      throw;
    } catch (const JudgeError&) {
      if (attempt >= ep.max_attempts) throw;
    }
    std::this_thread::sleep_for(backoff_delay(ep, attempt));
  }
}

} // namespace qppkit
