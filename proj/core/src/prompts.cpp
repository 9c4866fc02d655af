#include "qppkit/prompts.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "qppkit/errors.hpp"

namespace qppkit {

namespace {

constexpr const char* kRelevancePromptPrefix =
    "Instruction: Please assess the relevance of the provided passage to the following question. "
    "Please output \"Relevant\" or \"Irrelevant\".\n";

constexpr const char* kScorePromptInstruction =
    "Instruction: Evaluate the relevance of the ranked list of passages to the given query by "
    "providing a numerical score between 0 and 1. A score of \"1\" indicates that the ranked "
    "passages are highly relevant to the query, while a score of \"0\" means no relevance between "
    "the passages and the query.\n";

void append_query_passages(std::string& out, const std::string& query,
                           const std::vector<std::string>& passages) {
  out += "Query: " + query + "\n";
  for (std::size_t i = 0; i < passages.size(); ++i)
    out += "Passage " + std::to_string(i + 1) + ": " + passages[i] + "\n";
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

} // namespace

std::string build_relevance_prompt(const Query& query, const Document& passage) {
  if (query.text.empty()) throw std::invalid_argument("query text is empty");
  if (passage.text.empty()) throw std::invalid_argument("passage text is empty");
  std::string prompt = kRelevancePromptPrefix;
  prompt += "Question: " + query.text + "\n";
  prompt += "Passage: " + passage.text + "\n";
  prompt += "Output: Relevant/Irrelevant";
  return prompt;
}

int parse_relevance_output(const std::string& completion) {
  std::string text = lowercase(completion);
  std::size_t start = 0;
  while (start < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[start]);
    if (std::isspace(c) || std::ispunct(c)) {
      ++start;
    } else {
      break;
    }
  }
  std::string_view body(text.data() + start, text.size() - start);
  // "irrelevant" first: "relevant" is its suffix.
  if (body.starts_with("irrelevant")) return 0;
  if (body.starts_with("relevant")) return 1;
  throw JudgeError("unparseable relevance completion: \"" + completion + "\"");
}

std::string build_qpp_score_prompt(const std::string& query, const std::vector<std::string>& passages,
                                   const std::vector<Demonstration>& demonstrations) {
  if (query.empty()) throw std::invalid_argument("query text is empty");
  if (passages.empty()) throw std::invalid_argument("at least one passage is required");
  std::string prompt = kScorePromptInstruction;
  for (const auto& demo : demonstrations) {
    prompt += "\n";
    append_query_passages(prompt, demo.query, demo.passages);
    prompt += "Output: " + format_double(demo.value) + "\n";
  }
  prompt += "\n";
  append_query_passages(prompt, query, passages);
  prompt += "Output:";
  return prompt;
}

ParsedScore parse_score_output(const std::string& completion) {
  const char* data = completion.data();
  const std::size_t size = completion.size();
  for (std::size_t i = 0; i < size; ++i) {
    unsigned char c = static_cast<unsigned char>(completion[i]);
    bool candidate = std::isdigit(c) != 0;
    if ((c == '-' || c == '+' || c == '.') && i + 1 < size &&
        std::isdigit(static_cast<unsigned char>(completion[i + 1])))
      candidate = true;
    if (!candidate) continue;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(data + i, data + size, value);
    if (ec == std::errc() && ptr != data + i) {
      ParsedScore parsed;
      parsed.value = value;
      if (value < 0.0) {
        parsed.value = 0.0;
        parsed.clamped = true;
      } else if (value > 1.0) {
        parsed.value = 1.0;
        parsed.clamped = true;
      }
      return parsed;
    }
  }
  throw JudgeError("no numerical score in completion: \"" + completion + "\"");
}

} // namespace qppkit
