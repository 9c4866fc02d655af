#pragma once

#include <string>
#include <vector>

#include "qppkit/trec.hpp"

namespace qppkit {

/// Binary relevance-judging prompt for one (question, passage) pair.
/// The template is byte-stable; goldens under tests/data pin it.
std::string build_relevance_prompt(const Query& query, const Document& passage);

/// Map a raw model completion to a binary label. Lowercases, trims, strips
/// leading punctuation, then matches the "irrelevant" prefix BEFORE
/// "relevant" ("relevant" is a suffix of "irrelevant", so the naive order is
/// a correctness bug). Throws JudgeError with the raw text when neither
/// prefix matches.
int parse_relevance_output(const std::string& completion);

/// One in-context example for the direct-score prompt: a query, its top-k
/// passages, and the actual metric value the model should have produced.
struct Demonstration {
  std::string query;
  std::vector<std::string> passages;
  double value = 0.0;
};

/// Direct-score prompt: instructs the model to output one number in [0,1]
/// for a query and its top-k passages. Demonstrations are inserted verbatim
/// between the instruction and the target block.
std::string build_qpp_score_prompt(const std::string& query, const std::vector<std::string>& passages,
                                   const std::vector<Demonstration>& demonstrations = {});

struct ParsedScore {
  double value = 0.0;
  bool clamped = false; // completion was outside [0,1]
};

/// First real number in the completion, clamped to [0,1]. Throws JudgeError
/// when no number is present.
ParsedScore parse_score_output(const std::string& completion);

} // namespace qppkit
