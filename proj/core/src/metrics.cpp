#include "qppkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qppkit/errors.hpp"

namespace qppkit {
namespace {

// A judgment vector shorter than k is fine when the list itself ran out
// (short lists score as if padded with zeros). It is an error when the
// vector was cut off by the judging depth: then unjudged items within the
// cutoff would silently count as irrelevant.
void check_depth(const JudgmentVector& j, int k) {
  if (static_cast<int>(j.labels.size()) < k &&
      static_cast<std::size_t>(j.depth) == j.labels.size()) {
    throw DataError("judging depth " + std::to_string(j.depth) +
                    " is shallower than cutoff " + std::to_string(k) + " for query " +
                    j.query_id);
  }
}

double discount_sum(const std::vector<int>& labels, int k) {
  double sum = 0.0;
  const int limit = std::min<int>(k, static_cast<int>(labels.size()));
  for (int i = 1; i <= limit; ++i) {
    if (labels[static_cast<std::size_t>(i - 1)] == 0) continue;
    sum += (i == 1) ? 1.0 : 1.0 / std::log2(static_cast<double>(i));
  }
  return sum;
}

} // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::rr: return "rr";
    case MetricKind::ndcg: return "ndcg";
    case MetricKind::precision: return "p";
  }
  return "?";
}

MetricSpec MetricSpec::parse(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= text.size()) {
    throw ConfigError("bad metric spec: " + text + " (expected e.g. rr@10, ndcg@10, p@10)");
  }
  const std::string name = text.substr(0, at);
  MetricSpec spec;
  if (name == "rr") {
    spec.kind = MetricKind::rr;
  } else if (name == "ndcg") {
    spec.kind = MetricKind::ndcg;
  } else if (name == "p" || name == "precision") {
    spec.kind = MetricKind::precision;
  } else {
    throw ConfigError("unknown metric: " + name);
  }
  const std::string cutoff = text.substr(at + 1);
  try {
    std::size_t used = 0;
    spec.k = std::stoi(cutoff, &used);
    if (used != cutoff.size()) throw std::invalid_argument(cutoff);
  } catch (const std::exception&) {
    throw ConfigError("bad metric cutoff: " + text);
  }
  if (spec.k < 1) throw ConfigError("metric cutoff must be positive: " + text);
  spec.n = spec.k;
  return spec;
}

void MetricSpec::validate() const {
  if (k < 1) throw ConfigError("metric cutoff k must be positive");
  if (n < k) {
    throw ConfigError("judging depth n (" + std::to_string(n) +
                      ") must be at least the cutoff k (" + std::to_string(k) + ")");
  }
}

std::string MetricSpec::name() const { return to_string(kind) + "@" + std::to_string(k); }

double rr_at_k(const JudgmentVector& j, int k) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  check_depth(j, k);
  const int limit = std::min<int>(k, static_cast<int>(j.labels.size()));
  for (int i = 1; i <= limit; ++i) {
    if (j.labels[static_cast<std::size_t>(i - 1)] > 0) return 1.0 / i;
  }
  return 0.0;
}

double dcg_at_k(const JudgmentVector& j, int k) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  check_depth(j, k);
  return discount_sum(j.labels, k);
}

double idcg_at_k(const JudgmentVector& j, int k) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  check_depth(j, k);
  std::vector<int> sorted = j.labels;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return discount_sum(sorted, k);
}

double ndcg_at_k(const JudgmentVector& j, int k) {
  const double ideal = idcg_at_k(j, k);
  if (ideal == 0.0) return 0.0;
  return dcg_at_k(j, k) / ideal;
}

double precision_at_k(const JudgmentVector& j, int k) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  check_depth(j, k);
  const int limit = std::min<int>(k, static_cast<int>(j.labels.size()));
  int hits = 0;
  for (int i = 0; i < limit; ++i) {
    if (j.labels[static_cast<std::size_t>(i)] > 0) ++hits;
  }
  return static_cast<double>(hits) / k;
}

double metric_value(const JudgmentVector& j, const MetricSpec& spec) {
  switch (spec.kind) {
    case MetricKind::rr: return rr_at_k(j, spec.k);
    case MetricKind::ndcg: return ndcg_at_k(j, spec.k);
    case MetricKind::precision: return precision_at_k(j, spec.k);
  }
  throw ConfigError("unknown metric kind");
}

PredictResult predict_run(const RunMap& run, Judge& judge, JudgmentStore& store,
                          const MetricSpec& spec, const JudgingContext& context,
                          JudgeStats* stats) {
  auto results = predict_run_multi(run, judge, store, {spec}, context, stats);
  return std::move(results.front());
}

std::vector<PredictResult> predict_run_multi(const RunMap& run, Judge& judge,
                                             JudgmentStore& store,
                                             const std::vector<MetricSpec>& specs,
                                             const JudgingContext& context,
                                             JudgeStats* stats) {
  if (specs.empty()) throw ConfigError("no metrics requested");
  const int depth = specs.front().n;
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.n != depth) {
      throw ConfigError("all metrics in one pass must share the judging depth");
    }
  }

  std::vector<PredictResult> results(specs.size());
  for (const auto& [query_id, ranked] : run) {
    JudgmentVector j;
    try {
      j = judge_list(ranked, depth, judge, store, context, stats);
    } catch (const std::exception& e) {
      for (auto& result : results) result.errors.push_back({query_id, e.what()});
      continue;
    }
    for (std::size_t s = 0; s < specs.size(); ++s) {
      results[s].predictions.emplace(query_id, QppPrediction{query_id, metric_value(j, specs[s])});
    }
  }
  return results;
}

} // namespace qppkit
