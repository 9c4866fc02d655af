#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qppkit/baselines.hpp"
#include "qppkit/judge.hpp"
#include "qppkit/metrics.hpp"
#include "qppkit/stats.hpp"

namespace qppkit {

/// One sweep point; exactly one of report/error is meaningful. A row fails
/// on its own (degenerate correlation, judge failure) without stopping the
/// sweep.
struct SweepRow {
  int depth = 0;
  std::optional<CorrelationReport> report;
  std::string error;
};

/// Correlation against `actual` at each judging depth. Depths must be
/// non-decreasing and >= k; the shared store makes deeper rows pay only for
/// the items the shallower rows have not judged yet.
std::vector<SweepRow> depth_sweep(const RunMap& run, Judge& judge, JudgmentStore& store,
                                  MetricKind kind, int k, const std::vector<int>& depths,
                                  const std::map<std::string, double>& actual,
                                  const JudgingContext& context = {},
                                  JudgeStats* stats = nullptr);

struct ThresholdRow {
  double theta = 0.0;
  std::optional<CorrelationReport> report;
  std::string error;
};

struct ThresholdScanConfig {
  double theta_min = 0.0;
  double theta_max = 0.0;
  double step = 0.5;
  MetricSpec spec; // metric computed from each threshold judge's labels
};

/// Runs the prediction pipeline once per threshold value over [min, max] in
/// `step` increments, judging with score >= theta against the score table.
std::vector<ThresholdRow> threshold_scan(const RunMap& run, const ScoreTable& scores,
                                         const ThresholdScanConfig& config,
                                         const std::map<std::string, double>& actual,
                                         JudgmentStore& store, JudgeStats* stats = nullptr);

struct TuneCandidateResult {
  BaselineSpec spec;
  std::optional<double> pearson;
  std::string error;
};

struct TuneOutcome {
  BaselineSpec best;
  double pearson = 0.0;
  std::vector<TuneCandidateResult> candidates;
};

/// Grid selection on a labeled tuning set: the candidate with the highest
/// Pearson correlation wins; exact ties go to the smaller k, then the
/// smaller x. Candidates with undefined correlation are recorded and
/// skipped; all candidates failing is an error.
TuneOutcome tune_baseline(const RunMap& run, const BaselineInputs& inputs,
                          const std::map<std::string, double>& actual,
                          const std::vector<BaselineSpec>& candidates);

} // namespace qppkit
