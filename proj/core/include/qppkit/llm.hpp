#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "qppkit/judge.hpp"
#include "qppkit/prompts.hpp"

namespace qppkit {

enum class ApiStyle { completions, chat };

ApiStyle api_style_from(const std::string& name); // "completions" | "chat"

/// JSON-over-HTTP completion endpoint. Decoding is deterministic by default
/// (temperature 0, few new tokens) so repeated runs judge identically.
struct LlmEndpoint {
  std::string url;   // e.g. http://127.0.0.1:8080/v1/completions
  std::string model; // model name sent with every request
  ApiStyle style = ApiStyle::completions;
  double temperature = 0.0;
  int max_new_tokens = 8;
  std::string api_key; // sent as "Authorization: Bearer <key>" when non-empty

  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{1000}; // grows by backoff_factor per retry
  double backoff_factor = 2.0;
  std::chrono::milliseconds timeout{30000};

  void validate() const;
};

/// One HTTP round trip per call; retry policy lives in the callers.
class LlmClient {
public:
  explicit LlmClient(LlmEndpoint endpoint);

  /// Single request; returns the completion text. Throws JudgeError on
  /// transport failure, authentication failure (HTTP 401/403), malformed
  /// response, or an empty completion.
  std::string complete_once(const std::string& prompt) const;

  const LlmEndpoint& endpoint() const { return endpoint_; }

private:
  LlmEndpoint endpoint_;
};

/// LLM relevance judge. Sends the relevance prompt, parses the completion to
/// a binary label, and retries transient failures with exponential backoff.
/// A completion that stays unparseable after all attempts is recorded as
/// label 0 with fallback=true and the raw text preserved; transport and
/// authentication failures are raised instead.
class LlmJudge final : public Judge {
public:
  explicit LlmJudge(LlmEndpoint endpoint);

  std::string source() const override;
  bool needs_text() const override { return true; }
  JudgmentRecord judge(const JudgeRequest& request) override;

  const LlmClient& client() const { return client_; }

private:
  LlmClient client_;
};

struct DirectScore {
  double value = 0.0; // in [0,1]
  bool clamped = false;
};

/// Direct-score prediction: one completion for the whole top-k list, parsed
/// as a number and clamped to [0,1]. Same retry policy as the judge, but an
/// unparseable completion is an error (there is no safe default score).
DirectScore qpp_llm_direct(const LlmClient& client, const std::string& query,
                           const std::vector<std::string>& passages,
                           const std::vector<Demonstration>& demonstrations = {});

} // namespace qppkit
