#pragma once

#include <map>
#include <string>
#include <vector>

#include "qppkit/metrics.hpp"

namespace qppkit {

/// Predicted and actual values for the same queries, index-aligned.
struct PairedSeries {
  std::vector<std::string> query_ids;
  std::vector<double> predicted;
  std::vector<double> actual;

  std::size_t size() const { return query_ids.size(); }

  /// Length >= 2, equal-length fields, unique ids; throws StatError.
  void validate() const;
};

struct AlignResult {
  PairedSeries series;
  int dropped_predicted = 0; // predictions with no actual value
  int dropped_actual = 0;    // actual values with no prediction
};

/// Inner join on query id, sorted by id. Throws StatError when fewer than
/// two queries survive.
AlignResult align(const std::map<std::string, QppPrediction>& predicted,
                  const std::map<std::string, double>& actual);

/// 1-based ranks, ties given the mean of the positions they span.
std::vector<double> mean_ranks(const std::vector<double>& values);

/// Product-moment correlation; throws StatError when a side is constant.
double pearson(const PairedSeries& series);

/// Tie-corrected rank correlation, O(n log n). Agrees with direct
/// concordant/discordant pair counting on every input; throws StatError
/// when either side is entirely tied.
double kendall_tau_b(const PairedSeries& series);

/// Pearson correlation over mean-tie ranks.
double spearman(const PairedSeries& series);

/// Mean absolute rank displacement, scaled: mean |rank_pred - rank_actual|/n.
double smare(const PairedSeries& series);

/// Two-tailed p-value of r under the t test with n-2 degrees of freedom.
/// Requires n >= 3; |r| = 1 maps to p = 0.
double pearson_significance(double r, int n);

struct CorrelationReport {
  double pearson = 0.0;
  double kendall_tau_b = 0.0;
  double spearman = 0.0;
  double smare = 0.0;
  double pearson_p_value = 1.0;
  int n_queries = 0;
};

/// All correlation statistics for one series; propagates the undefined-
/// correlation errors of its parts.
CorrelationReport correlate(const PairedSeries& series);

} // namespace qppkit
