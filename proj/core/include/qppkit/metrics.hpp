#pragma once

#include <map>
#include <string>
#include <vector>

#include "qppkit/judge.hpp"

namespace qppkit {

enum class MetricKind { rr, ndcg, precision };

std::string to_string(MetricKind kind);

/// Predicted measure: `kind@k` computed from judgments over the top n items.
struct MetricSpec {
  MetricKind kind = MetricKind::rr;
  int k = 10;
  int n = 10;

  /// Parses "rr@10", "ndcg@20", "p@5" or "precision@5". The judging depth
  /// defaults to the cutoff; callers widen it separately.
  static MetricSpec parse(const std::string& text);

  /// Checks k >= 1 and n >= k; throws ConfigError otherwise.
  void validate() const;

  /// Canonical name, e.g. "ndcg@10".
  std::string name() const;
};

/// Reciprocal rank of the first relevant item within the top k, 0 if none.
double rr_at_k(const JudgmentVector& j, int k);

/// Gain 1 at rank 1, 1/log2(i) at rank i >= 2, summed over relevant items in
/// the top k. Positions past the end of the list contribute 0.
double dcg_at_k(const JudgmentVector& j, int k);

/// Same discounted sum over the judged labels re-sorted descending: the ideal
/// ordering of what the judge found in the top n.
double idcg_at_k(const JudgmentVector& j, int k);

/// dcg/idcg; 0 when nothing in the top n was judged relevant.
double ndcg_at_k(const JudgmentVector& j, int k);

/// Fraction of the top k judged relevant; short lists pad with 0.
double precision_at_k(const JudgmentVector& j, int k);

/// Dispatch on spec.kind; always in [0,1].
double metric_value(const JudgmentVector& j, const MetricSpec& spec);

struct QppPrediction {
  std::string query_id;
  double value = 0.0;
};

struct PredictError {
  std::string query_id;
  std::string message;
};

/// Predictions keyed by query id plus the queries that failed; a failed query
/// appears in `errors` and not in `predictions`.
struct PredictResult {
  std::map<std::string, QppPrediction> predictions;
  std::vector<PredictError> errors;
};

/// Judges each ranked list to depth spec.n (through the store cache), then
/// scores it at cutoff spec.k. Failures are collected per query; the
/// remaining queries still produce predictions.
PredictResult predict_run(const RunMap& run, Judge& judge, JudgmentStore& store,
                          const MetricSpec& spec, const JudgingContext& context = {},
                          JudgeStats* stats = nullptr);

/// One judging pass, several measures: all specs must share the same depth n.
/// Result i corresponds to specs[i].
std::vector<PredictResult> predict_run_multi(const RunMap& run, Judge& judge,
                                             JudgmentStore& store,
                                             const std::vector<MetricSpec>& specs,
                                             const JudgingContext& context = {},
                                             JudgeStats* stats = nullptr);

} // namespace qppkit
