#pragma once

#include <string>
#include <vector>

#include "qppkit/judgments.hpp"
#include "qppkit/trec.hpp"

namespace qppkit {

/// Binary labels for the first min(n, |L|) entries of one ranked list,
/// aligned with ranked-list order. `depth` records the requested n.
struct JudgmentVector {
  std::string query_id;
  int depth = 0;
  std::vector<int> labels;
};

struct JudgeRequest {
  std::string query_id;
  std::string doc_id;
  const Query* query = nullptr;       // set when the judge needs text
  const Document* document = nullptr; // set when the judge needs text
};

/// A relevance judge. Implementations must be safe to call concurrently.
class Judge {
public:
  virtual ~Judge() = default;

  /// Cache identity, "<kind>[:qualifier]". Distinct judges must not collide.
  virtual std::string source() const = 0;

  /// True when judge() needs query/document text resolved from collections.
  virtual bool needs_text() const { return false; }

  virtual JudgmentRecord judge(const JudgeRequest& request) = 0;
};

/// Binarizes human qrels: label 1 iff a grade exists and is >= min_grade.
class OracleJudge final : public Judge {
public:
  explicit OracleJudge(const Qrels& qrels, int min_grade = 2);

  std::string source() const override;
  JudgmentRecord judge(const JudgeRequest& request) override;

  int min_grade() const { return min_grade_; }

private:
  const Qrels& qrels_;
  int min_grade_;
};

/// Labels 1 iff a re-ranker score meets or exceeds theta. A missing pair is
/// an error; a threshold judge cannot abstain.
class ThresholdJudge final : public Judge {
public:
  ThresholdJudge(const ScoreTable& scores, double theta);

  std::string source() const override;
  JudgmentRecord judge(const JudgeRequest& request) override;

  double theta() const { return theta_; }

private:
  const ScoreTable& scores_;
  double theta_;
};

/// Text lookup plus the per-list concurrency cap for judge_list.
struct JudgingContext {
  const CollectionStore* queries = nullptr;
  const CollectionStore* corpus = nullptr;
  int max_in_flight = 8;
};

struct JudgeStats {
  std::size_t cache_hits = 0;
  std::size_t invocations = 0;
  std::size_t fallbacks = 0;
};

/// Judge the top-n entries of a ranked list through the store: cached records
/// are reused, misses are judged (up to context.max_in_flight concurrently)
/// and appended to the store in ranked-list order. Judge errors are rethrown
/// annotated with the query, document, and rank position.
JudgmentVector judge_list(const RankedList& ranked, int depth, Judge& judge, JudgmentStore& store,
                          const JudgingContext& context = {}, JudgeStats* stats = nullptr);

} // namespace qppkit
